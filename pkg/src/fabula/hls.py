"""Transient candidate events built from shadows plus temporal links.

A candidate clusters memory events that all suggest the same not-yet-told
event. Candidates are built fresh for every query, scored by summed
support, and thrown away afterwards; nothing here is ever persisted.
Instantiating a candidate feeds a normal insertion back through the
engine, so confabulated events are re-memorized exactly like narrated
ones and become available to later recall themselves.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple, Union

from .dictionary import CONCEPT, Overlay
from .engine import CONFABULATED, Engine, Instance, VerbInstance
from .errors import BadArgument, BadPosition, StaleCandidate
from .parser import NewInstance, ViTemplate

# A role maps either onto a live focus instance or onto a to-be-created one.
RoleTarget = Union[Tuple[str, int], Tuple[str, Overlay]]  # ("focus", id) | ("new", overlay)


@dataclass
class HlsCandidate:
    prototype_verbs: Overlay  # copy of the first supporter's verbs
    subject_target: RoleTarget
    object_target: Optional[RoleTarget]
    supporters: Dict[int, float] = field(default_factory=dict)
    created_order: int = 0
    revision: int = -1  # engine revision at build time; guards instantiation

    @property
    def signature(self) -> tuple:
        return (_sig(self.subject_target), _sig(self.object_target))

    def score(self) -> float:
        return sum(self.supporters[k] for k in sorted(self.supporters))

    def first_supporter_tick(self, engine: Engine) -> int:
        return min(engine.entities[s].tick for s in self.supporters)

    def render(self) -> dict:
        top = sorted(self.supporters.items(), key=lambda kv: (-kv[1], kv[0]))[:5]
        return {
            "score": self.score(),
            "verbs": dict(self.prototype_verbs.items()),
            "roles": {
                "subject": _render_target(self.subject_target),
                "object": _render_target(self.object_target),
            },
            "supporters": [{"vi": vi_id, "support": support} for vi_id, support in top],
        }


def _sig(target: Optional[RoleTarget]):
    if target is None:
        return None
    kind, payload = target
    return ("focus", payload) if kind == "focus" else ("new",)


def _render_target(target: Optional[RoleTarget]):
    if target is None:
        return None
    kind, payload = target
    if kind == "focus":
        return {"instance": payload}
    return {"new_instance": dict(payload.items())}


def _reverse_instance_map(engine: Engine) -> Dict[int, Tuple[float, int]]:
    """memory instance -> (weight, focus instance) with the strongest shadow link.

    Focus instances are scanned in ascending id order and only strictly
    greater weights replace the incumbent, so ties keep the lowest id.
    """
    best: Dict[int, Tuple[float, int]] = {}
    for inst in engine.focus_instances():
        for j, w in engine.shadows.map_of(inst.id).items():
            cur = best.get(j)
            if cur is None or w > cur[0]:
                best[j] = (w, inst.id)
    return best


def _matched_memory_ids(engine: Engine) -> set:
    """Memory events that already have a focus counterpart."""
    matched = set()
    threshold = engine.config.matched_threshold
    for v in engine.focus_vis():
        for target, w in engine.shadows.map_of(v.id).items():
            if w >= threshold:
                matched.add(target)
    return matched


class _Builder:
    """First-fit clustering of votes into candidates, in creation order."""

    def __init__(self, engine: Engine):
        self.engine = engine
        self.candidates: List[HlsCandidate] = []
        self._rev_map = _reverse_instance_map(engine)

    def _role_target(self, memory_instance_id: Optional[int]) -> Optional[RoleTarget]:
        if memory_instance_id is None:
            return None
        hit = self._rev_map.get(memory_instance_id)
        if hit is not None and hit[0] >= self.engine.config.instance_threshold:
            return ("focus", hit[1])
        mem = self.engine.entities[memory_instance_id]
        floor = self.engine.config.attribute_floor
        kept = {name: w for name, w in mem.overlay.items() if w >= floor}
        return ("new", Overlay(CONCEPT, kept))

    def add_vote(self, supporter: VerbInstance, contribution: float) -> None:
        subject_target = self._role_target(supporter.subject)
        object_target = self._role_target(supporter.object)
        sig = (_sig(subject_target), _sig(object_target))
        threshold = self.engine.config.cluster_threshold
        for cand in self.candidates:
            if cand.signature != sig:
                continue
            sim = self.engine.dictionary.overlay_similarity(cand.prototype_verbs, supporter.verbs)
            if sim >= threshold:
                cand.supporters[supporter.id] = cand.supporters.get(supporter.id, 0.0) + contribution
                return
        cand = HlsCandidate(
            prototype_verbs=supporter.verbs,
            subject_target=subject_target,
            object_target=object_target,
            supporters={supporter.id: contribution},
            created_order=len(self.candidates),
            revision=self.engine.revision,
        )
        self.candidates.append(cand)

    def ranked(self, top: int) -> List[HlsCandidate]:
        """Score descending, then earliest supporter tick, then lowest supporter id."""
        order = sorted(
            self.candidates,
            key=lambda c: (
                -c.score(),
                c.first_supporter_tick(self.engine),
                min(c.supporters),
            ),
        )
        return order[:top]


def build_continuations(engine: Engine, top: int = 5) -> List[HlsCandidate]:
    """Rank likely next events from successors of shadowed memory events.

    The most recent focus events (up to the continuation window) vote with
    weight salience * shadow weight * discount^(depth-1). Successors that
    already have a focus counterpart are skipped.
    """
    cfg = engine.config
    builder = _Builder(engine)
    matched = _matched_memory_ids(engine)
    window = engine.focus_vis()[-cfg.continuation_window :]
    for v in window:
        u = v.salience
        for m_id, w in engine.shadows.ordered(v.id):
            m = engine.entities[m_id]
            if not isinstance(m, VerbInstance):
                continue
            for depth in range(1, cfg.successor_depth + 1):
                successor = engine.story_neighbor(m, depth)
                if successor is None:
                    break
                if not successor.demoted or successor.id in matched:
                    continue
                contribution = u * w * cfg.successor_discount ** (depth - 1)
                builder.add_vote(successor, contribution)
    return builder.ranked(top)


def cloze_infer(engine: Engine, position: int, top: int = 5) -> List[HlsCandidate]:
    """Infer the event missing at ``position`` in the focus event sequence.

    Events before the gap vote through successor links, events after it
    through predecessor links, each at its distance from the gap; depth is
    capped by the successor depth and votes are not salience weighted, so
    both sides of the gap count equally.
    """
    cfg = engine.config
    sequence = engine.focus_vis()
    if not sequence or position < 0 or position > len(sequence):
        raise BadPosition(f"gap position {position} outside focus sequence of length {len(sequence)}")
    builder = _Builder(engine)
    for index, v in enumerate(sequence):
        if index < position:
            depth, step = position - index, 1
        else:
            depth, step = index - position + 1, -1
        if depth > cfg.successor_depth:
            continue
        for m_id, w in engine.shadows.ordered(v.id):
            m = engine.entities[m_id]
            if not isinstance(m, VerbInstance):
                continue
            neighbor = engine.story_neighbor(m, step * depth)
            if neighbor is None or not neighbor.demoted:
                continue
            builder.add_vote(neighbor, w * cfg.successor_discount ** (depth - 1))
    return builder.ranked(top)


def _template_ref(target: Optional[RoleTarget]):
    if target is None:
        return None
    kind, payload = target
    return payload if kind == "focus" else NewInstance(payload)


def instantiate(engine: Engine, candidate: HlsCandidate) -> int:
    """Insert the candidate as a confabulated event through the normal pipeline."""
    if candidate.revision != engine.revision:
        raise StaleCandidate("candidate is stale; rebuild after any engine mutation")
    template = ViTemplate(
        verbs=candidate.prototype_verbs,
        subject_ref=_template_ref(candidate.subject_target),
        object_ref=_template_ref(candidate.object_target),
    )
    return engine.insert_vi(template, provenance=CONFABULATED)


def confabulate(engine: Engine, steps: int) -> List[int]:
    """Greedy top-1 continuation, repeated. Stops early when no candidate exists."""
    if steps < 1:
        raise BadArgument(f"steps must be >= 1, got {steps}")
    inserted: List[int] = []
    for _ in range(steps):
        candidates = build_continuations(engine, 1)
        if not candidates:
            break
        inserted.append(instantiate(engine, candidates[0]))
    return inserted
