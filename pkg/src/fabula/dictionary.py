"""Symbol dictionary: concept and verb entries, pairwise overlaps, overlay algebra.

A dictionary is immutable after load, so it is safe to share across threads.
Overlays are weighted bundles of same-kind symbols; similarity between two
overlays is a kernel cosine, with the overlap table as the kernel, clamped
to [0, 1] so non positive-definite tables cannot push it out of range.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Dict, Iterable, List, Tuple

from .errors import (
    BadWeight,
    DictionaryFormatError,
    DuplicateName,
    KindMismatch,
    UnknownName,
    UnknownOverlapTarget,
)

CONCEPT = "concept"
VERB = "verb"

NAME_RE = re.compile(r"[a-z][a-z0-9_-]*\Z")
NUMBER_RE = re.compile(r"[0-9.eE+-]+\Z")


@dataclass(frozen=True)
class DictEntry:
    name: str
    kind: str


class Overlay:
    """Weighted set of dictionary symbols, all of one kind.

    Stored weights are always in (0, 1]; an empty overlay is permitted.
    Overlays are treated as immutable values: ``add`` returns a new overlay.
    """

    __slots__ = ("kind", "_weights")

    def __init__(self, kind: str, weights: Dict[str, float] | None = None):
        self.kind = kind
        self._weights = dict(weights or {})

    def items(self) -> List[Tuple[str, float]]:
        """Members in canonical order (name ascending)."""
        return sorted(self._weights.items())

    def weights(self) -> Dict[str, float]:
        return dict(self._weights)

    def get(self, name: str) -> float:
        return self._weights.get(name, 0.0)

    def key(self) -> Tuple[Tuple[str, float], ...]:
        return tuple(sorted(self._weights.items()))

    def __len__(self) -> int:
        return len(self._weights)

    def __contains__(self, name: str) -> bool:
        return name in self._weights

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Overlay)
            and self.kind == other.kind
            and self._weights == other._weights
        )

    def __hash__(self) -> int:
        return hash((self.kind, self.key()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{n}:{w:g}" for n, w in self.items())
        return f"Overlay({self.kind}, {{{inner}}})"


class Dictionary:
    """All declared symbols plus their pairwise overlaps."""

    def __init__(self) -> None:
        self.entries: Dict[str, DictEntry] = {}
        # Keyed by (min(a, b), max(a, b)); the diagonal is implicit 1.
        self.overlaps: Dict[Tuple[str, str], float] = {}
        self._sim_cache: Dict[tuple, float] = {}

    # -- construction -----------------------------------------------------

    def _declare(self, name: str, kind: str) -> None:
        if not NAME_RE.match(name):
            raise DictionaryFormatError(f"bad symbol name: {name!r}")
        if name in self.entries:
            raise DuplicateName(f"symbol declared twice: {name!r}")
        self.entries[name] = DictEntry(name, kind)

    def _set_overlap(self, a: str, b: str, weight: float) -> None:
        for name in (a, b):
            if name not in self.entries:
                raise UnknownOverlapTarget(f"overlap references undeclared name: {name!r}")
        if self.entries[a].kind != self.entries[b].kind:
            raise KindMismatch(f"overlap across kinds: {a!r} is a {self.entries[a].kind}, {b!r} is a {self.entries[b].kind}")
        if not (0.0 <= weight <= 1.0) or math.isnan(weight):
            raise BadWeight(f"overlap weight must be in [0,1], got {weight!r}")
        if a == b:
            raise DictionaryFormatError(f"self-overlap for {a!r} (the diagonal is fixed at 1)")
        key = (a, b) if a < b else (b, a)
        if key in self.overlaps:
            raise DictionaryFormatError(f"overlap declared twice: {key[0]} {key[1]}")
        self.overlaps[key] = weight

    # -- lookups ----------------------------------------------------------

    def kind_of(self, name: str) -> str | None:
        entry = self.entries.get(name)
        return entry.kind if entry else None

    def has(self, name: str, kind: str) -> bool:
        entry = self.entries.get(name)
        return entry is not None and entry.kind == kind

    def overlap(self, a: str, b: str) -> float:
        if a == b:
            return 1.0
        key = (a, b) if a < b else (b, a)
        return self.overlaps.get(key, 0.0)

    # -- overlay algebra --------------------------------------------------

    def overlay(self, kind: str, weights: Dict[str, float] | None = None) -> Overlay:
        """Build an overlay, validating each member against the dictionary."""
        out = Overlay(kind)
        for name, w in (weights or {}).items():
            out = self.overlay_add(out, name, w)
        return out

    def overlay_add(self, o: Overlay, name: str, w: float) -> Overlay:
        """Return ``o`` with ``name`` at weight ``max(old, w)``; other members unchanged."""
        entry = self.entries.get(name)
        if entry is None:
            raise UnknownName(f"not in dictionary: {name!r}")
        if entry.kind != o.kind:
            raise KindMismatch(f"{name!r} is a {entry.kind}, overlay holds {o.kind}s")
        if not (0.0 < w <= 1.0) or math.isnan(w):
            raise BadWeight(f"overlay weight must be in (0,1], got {w!r}")
        merged = o.weights()
        merged[name] = max(merged.get(name, 0.0), w)
        return Overlay(o.kind, merged)

    def overlay_similarity(self, a: Overlay, b: Overlay) -> float:
        """Kernel cosine of two same-kind overlays, clamped to [0, 1].

        Computed in a canonical argument order so the result is exactly
        symmetric at the floating-point level.
        """
        if a.kind != b.kind:
            raise KindMismatch(f"cannot compare a {a.kind} overlay with a {b.kind} overlay")
        if len(a) == 0 or len(b) == 0:
            return 0.0
        ka, kb = a.key(), b.key()
        if kb < ka:
            ka, kb = kb, ka
        cached = self._sim_cache.get((ka, kb))
        if cached is not None:
            return cached
        cross = self._kernel(ka, kb)
        energy_a = self._kernel(ka, ka)
        energy_b = self._kernel(kb, kb)
        sim = cross / math.sqrt(energy_a * energy_b)
        sim = min(1.0, max(0.0, sim))
        self._sim_cache[(ka, kb)] = sim
        return sim

    def _kernel(self, ka: tuple, kb: tuple) -> float:
        total = 0.0
        for name_a, w_a in ka:
            for name_b, w_b in kb:
                ov = self.overlap(name_a, name_b)
                if ov:
                    total += w_a * w_b * ov
        return total

    # -- canonical serialization -------------------------------------------

    def to_payload(self) -> dict:
        return {
            "entries": [[e.name, e.kind] for e in sorted(self.entries.values(), key=lambda e: e.name)],
            "overlaps": [[a, b, w] for (a, b), w in sorted(self.overlaps.items())],
        }

    @classmethod
    def from_payload(cls, payload: dict) -> "Dictionary":
        d = cls()
        for name, kind in payload["entries"]:
            d._declare(name, kind)
        for a, b, w in payload["overlaps"]:
            d._set_overlap(a, b, float(w))
        return d


def _parse_weight(token: str) -> float:
    if not NUMBER_RE.match(token):
        raise BadWeight(f"not a number: {token!r}")
    try:
        return float(token)
    except ValueError:
        raise BadWeight(f"not a number: {token!r}") from None


def load_dictionary(source: str) -> Dictionary:
    """Parse the line-based dictionary format.

    Lines: ``concept <name>``, ``verb <name>``, ``overlap <a> <b> <weight>``.
    ``#`` starts a comment; blank lines are ignored. Loading is order
    independent: overlap lines may precede the declarations they reference.
    """
    declarations: List[Tuple[str, str]] = []
    overlaps: List[Tuple[str, str, float]] = []
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        head = parts[0].lower()
        if head in (CONCEPT, VERB):
            if len(parts) != 2:
                raise DictionaryFormatError(f"line {lineno}: expected '{head} <name>'")
            declarations.append((parts[1].lower(), head))
        elif head == "overlap":
            if len(parts) != 4:
                raise DictionaryFormatError(f"line {lineno}: expected 'overlap <a> <b> <weight>'")
            overlaps.append((parts[1].lower(), parts[2].lower(), _parse_weight(parts[3])))
        else:
            raise DictionaryFormatError(f"line {lineno}: unknown directive {parts[0]!r}")
    d = Dictionary()
    for name, kind in declarations:
        d._declare(name, kind)
    for a, b, w in overlaps:
        d._set_overlap(a, b, w)
    return d
