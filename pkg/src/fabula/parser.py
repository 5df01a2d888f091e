"""Parser for the controlled story language, plus reference resolution.

Grammar, per line:

    sentence := np '/' vp ('/' np)? '.'
    np       := ('a' | 'the') word+
    vp       := word+

``----`` alone on a line is a scene break; ``!name arg...`` is a directive.
Tokens are whitespace separated and matched case-insensitively; a sentence
must end with a period, which may be attached to the last word. Errors carry
the 1-based column of the first offending token.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple, Union

from .dictionary import CONCEPT, VERB, Dictionary, Overlay
from .errors import NoReferent, ParseError, UnknownWord

WORD_RE = re.compile(r"[a-z][a-z0-9_-]*\Z")
DETERMINERS = ("a", "the")


@dataclass(frozen=True)
class Token:
    text: str
    col: int  # 1-based


@dataclass(frozen=True)
class NounPhrase:
    determiner: str
    attributes: Tuple[str, ...]  # last token is the head noun

    @property
    def head(self) -> str:
        return self.attributes[-1]


@dataclass(frozen=True)
class SentenceAst:
    subject: NounPhrase
    verbs: Tuple[str, ...]
    object: Optional[NounPhrase] = None


@dataclass(frozen=True)
class Directive:
    name: str
    args: Tuple[str, ...]


@dataclass(frozen=True)
class SceneBreak:
    pass


@dataclass(frozen=True)
class NewInstance:
    """Request to create a fresh participant with the given attribute overlay."""

    overlay: Overlay


@dataclass(frozen=True)
class ViTemplate:
    """Resolved insertion request: verb overlay plus role references."""

    verbs: Overlay
    subject_ref: Union[int, NewInstance]
    object_ref: Union[int, NewInstance, None] = None


ParseOutcome = Union[SentenceAst, Directive, SceneBreak]


def _lex(line: str) -> List[Token]:
    tokens: List[Token] = []
    for match in re.finditer(r"\S+", line):
        text = match.group(0)
        col = match.start() + 1
        # A single trailing period detaches into its own token.
        if len(text) > 1 and text.endswith("."):
            tokens.append(Token(text[:-1], col))
            tokens.append(Token(".", col + len(text) - 1))
        else:
            tokens.append(Token(text, col))
    return tokens


class _Cursor:
    def __init__(self, tokens: Sequence[Token], line_len: int):
        self.tokens = tokens
        self.pos = 0
        self.line_len = line_len

    def peek(self) -> Optional[Token]:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def advance(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected: str) -> ParseError:
        tok = self.peek()
        if tok is None:
            return ParseError(f"expected {expected} at end of line", self.line_len + 1)
        return ParseError(f"expected {expected}, found {tok.text!r}", tok.col)


def _is_word(text: str) -> bool:
    return WORD_RE.match(text) is not None


def _parse_np(cur: _Cursor) -> NounPhrase:
    tok = cur.peek()
    if tok is None or tok.text.lower() not in DETERMINERS:
        raise cur.fail("determiner ('a' or 'the')")
    det = cur.advance().text.lower()
    words: List[str] = []
    while (tok := cur.peek()) is not None and _is_word(tok.text.lower()):
        words.append(cur.advance().text.lower())
    if not words:
        raise cur.fail("word")
    return NounPhrase(det, tuple(words))


def parse_line(line: str) -> ParseOutcome:
    """Parse one line into a sentence, directive or scene break.

    Pure and total: every input yields exactly one of those three values or
    a ParseError. Comment stripping is the caller's concern.
    """
    tokens = _lex(line)
    cur = _Cursor(tokens, len(line))
    first = cur.peek()
    if first is None:
        raise ParseError("expected sentence, scene break or directive on empty line", 1)

    if first.text == "----":
        cur.advance()
        if (extra := cur.peek()) is not None:
            raise ParseError(f"unexpected token after scene break: {extra.text!r}", extra.col)
        return SceneBreak()

    if first.text.startswith("!"):
        cur.advance()
        name = first.text[1:].lower()
        if not _is_word(name):
            raise ParseError("expected directive name after '!'", first.col)
        args = tuple(tok.text for tok in tokens[cur.pos :])
        return Directive(name, args)

    subject = _parse_np(cur)
    tok = cur.peek()
    if tok is None or tok.text != "/":
        raise cur.fail("'/'")
    cur.advance()

    verbs: List[str] = []
    while (tok := cur.peek()) is not None and _is_word(tok.text.lower()):
        verbs.append(cur.advance().text.lower())
    if not verbs:
        raise cur.fail("verb word")

    obj: Optional[NounPhrase] = None
    tok = cur.peek()
    if tok is not None and tok.text == "/":
        cur.advance()
        obj = _parse_np(cur)
        tok = cur.peek()

    if tok is None or tok.text != ".":
        raise cur.fail("'.'")
    cur.advance()
    if (extra := cur.peek()) is not None:
        raise ParseError(f"unexpected token after sentence end: {extra.text!r}", extra.col)
    return SentenceAst(subject, tuple(verbs), obj)


def pretty(ast: SentenceAst) -> str:
    """Canonical rendering; re-parsing it yields a structurally equal AST."""

    def np(phrase: NounPhrase) -> str:
        return " ".join((phrase.determiner,) + phrase.attributes)

    parts = [np(ast.subject), " ".join(ast.verbs)]
    if ast.object is not None:
        parts.append(np(ast.object))
    text = " / ".join(parts) + "."
    return text[0].upper() + text[1:]


def _np_overlay(phrase: NounPhrase, dictionary: Dictionary) -> Overlay:
    overlay = Overlay(CONCEPT)
    for word in phrase.attributes:
        if not dictionary.has(word, CONCEPT):
            raise UnknownWord(word)
        overlay = dictionary.overlay_add(overlay, word, 1.0)
    return overlay


def _resolve_np(phrase, focus_instances, dictionary, threshold):
    wanted = _np_overlay(phrase, dictionary)
    if phrase.determiner == "a":
        return NewInstance(wanted)
    # 'the': best-matching focus instance; ties fall to the most recently
    # referenced, then to the highest id.
    best = None
    best_key = None
    for inst in focus_instances:
        sim = dictionary.overlay_similarity(inst.overlay, wanted)
        if sim < threshold:
            continue
        key = (sim, inst.last_referenced_tick, inst.id)
        if best_key is None or key > best_key:
            best, best_key = inst, key
    if best is None:
        raise NoReferent(f"no focus instance matches 'the {' '.join(phrase.attributes)}'")
    return best.id


def resolve(
    ast: SentenceAst,
    focus_instances: Iterable,
    dictionary: Dictionary,
    reference_threshold: float = 0.1,
) -> ViTemplate:
    """Resolve an AST against the focus into an insertion template.

    ``focus_instances`` is any iterable of objects with ``id``, ``overlay``
    and ``last_referenced_tick``. Never mutates the focus; instance creation
    is deferred to the insertion pipeline.
    """
    instances = list(focus_instances)
    verbs = Overlay(VERB)
    for word in ast.verbs:
        if not dictionary.has(word, VERB):
            raise UnknownWord(word)
        verbs = dictionary.overlay_add(verbs, word, 1.0)
    subject_ref = _resolve_np(ast.subject, instances, dictionary, reference_threshold)
    object_ref = None
    if ast.object is not None:
        object_ref = _resolve_np(ast.object, instances, dictionary, reference_threshold)
    return ViTemplate(verbs, subject_ref, object_ref)


def strip_comment(line: str) -> str:
    """Drop everything from the first '#'; scenario and REPL inputs use this."""
    return line.split("#", 1)[0]
