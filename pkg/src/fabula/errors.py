"""Error types shared across the engine, parser, CLI and HTTP layers.

Every error carries a stable machine-readable ``code`` so the CLI and the
HTTP API can report failures uniformly without matching on class names.
"""

from __future__ import annotations


class EngineError(Exception):
    """Base class for all errors raised by this package."""

    code = "engine_error"


class DictionaryFormatError(EngineError):
    code = "dictionary_format"


class DuplicateName(EngineError):
    code = "duplicate_name"


class UnknownOverlapTarget(EngineError):
    code = "unknown_overlap_target"


class BadWeight(EngineError):
    code = "bad_weight"


class KindMismatch(EngineError):
    code = "kind_mismatch"


class UnknownName(EngineError):
    code = "unknown_name"


class ParseError(EngineError):
    """Pidgin syntax error. ``col`` is the 1-based column of the first offending token."""

    code = "parse_error"

    def __init__(self, message: str, col: int):
        super().__init__(message)
        self.col = col


class UnknownWord(EngineError):
    code = "unknown_word"

    def __init__(self, token: str):
        super().__init__(f"unknown word: {token!r}")
        self.token = token


class NoReferent(EngineError):
    code = "no_referent"


class UnknownInstance(EngineError):
    code = "unknown_id"


class UnknownOwner(EngineError):
    code = "unknown_id"


class BadPosition(EngineError):
    code = "bad_position"


class BadArgument(EngineError):
    code = "bad_request"


class StaleCandidate(EngineError):
    code = "stale_candidate"


class FormatVersionMismatch(EngineError):
    code = "format_version_mismatch"


class CorruptSnapshot(EngineError):
    code = "corrupt_snapshot"


class ConfigError(EngineError):
    code = "config_error"


class NarrationError(EngineError):
    """Wraps an error raised while executing one line of a multi-line narration.

    ``inserted`` lists the ids inserted by the lines that succeeded before
    the failure; those insertions persist.
    """

    def __init__(self, line: int, cause: EngineError, inserted: list | None = None):
        super().__init__(f"line {line}: {cause}")
        self.line = line
        self.cause = cause
        self.inserted = list(inserted or [])

    @property
    def code(self) -> str:  # type: ignore[override]
        return self.cause.code
