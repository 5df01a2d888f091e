"""Shadow maintenance: the link between focus entities and episodic memory.

Each focus entity owns one shadow, a weighted map onto demoted memory
entities of the same type (instances shadow instances, events shadow
events). Two activities keep shadows current:

* spike: fired once per insertion, matches the new event against every
  memory event by verb similarity damped by structural role consistency,
  and spills a fraction of each match onto the role instances' shadows;
* diffusion: fired once per tick, decays all weights, pushes weight from
  event shadows along role links, caps each shadow's total at 1, and
  prunes dust.

All iteration orders are fixed (tick order, weight descending then id
ascending, id ascending) so floating-point results are reproducible.
"""

from __future__ import annotations

from typing import Dict, List, Tuple

from .errors import UnknownOwner

_ROLES = ("subject", "object")


class ShadowSet:
    """One shadow per focus entity, discarded at demotion."""

    def __init__(self) -> None:
        self.maps: Dict[int, Dict[int, float]] = {}

    def create(self, owner_id: int) -> None:
        self.maps[owner_id] = {}

    def discard(self, owner_id: int) -> None:
        self.maps.pop(owner_id, None)

    def map_of(self, owner_id: int) -> Dict[int, float]:
        return self.maps.get(owner_id, {})

    def ordered(self, owner_id: int) -> List[Tuple[int, float]]:
        """Entries sorted weight descending, then memory id ascending."""
        return sorted(self.maps.get(owner_id, {}).items(), key=lambda kv: (-kv[1], kv[0]))

    def get(self, engine, owner_id: int) -> List[Tuple[int, float]]:
        if owner_id not in self.maps:
            raise UnknownOwner(f"no focus entity with id {owner_id}")
        return self.ordered(owner_id)

    def _bump(self, engine, kind: str, owner_id: int, target_id: int, delta: float) -> None:
        shadow = self.maps[owner_id]
        weight = shadow.get(target_id, 0.0) + delta
        shadow[target_id] = weight
        if engine.trace is not None and delta != 0.0:
            engine.trace(engine.tick, kind, owner_id, target_id, delta, weight)

    # -- spike activity ------------------------------------------------------

    def spike(self, engine, vi) -> None:
        """Match the just-inserted event against every memory event, in tick order.

        delta = verb_similarity * consistency, where consistency multiplies,
        per role, the shadow weight already linking the two role instances
        (floored at the consistency floor), uses the floor alone when only
        one side fills the role, and is 1 when neither has an object.
        """
        cfg = engine.config
        floor = cfg.consistency_floor
        for m in engine.memory_vis():
            sim = engine.dictionary.overlay_similarity(vi.verbs, m.verbs)
            if sim < cfg.verb_match_floor:
                continue
            kappa = 1.0
            for role in _ROLES:
                v_role = getattr(vi, role)
                m_role = getattr(m, role)
                if v_role is not None and m_role is not None:
                    linked = self.maps[v_role].get(m_role, 0.0)
                    kappa *= max(linked, floor)
                elif v_role is not None or m_role is not None:
                    kappa *= floor
            delta = sim * kappa
            self._bump(engine, "spike", vi.id, m.id, delta)
            for role in _ROLES:
                v_role = getattr(vi, role)
                m_role = getattr(m, role)
                if v_role is None or m_role is None:
                    continue
                # shadows may only reference demoted entities
                if engine.entities[m_role].demoted:
                    self._bump(engine, "spike", v_role, m_role, cfg.argument_spill * delta)

    # -- diffusion activity ----------------------------------------------------

    def tick(self, engine) -> None:
        """Decay, diffuse along role links, cap totals at 1, prune."""
        cfg = engine.config

        for owner_id in sorted(self.maps):
            shadow = self.maps[owner_id]
            for target_id in shadow:
                shadow[target_id] *= cfg.shadow_decay

        # contributions read pre-diffusion values
        snapshot = {owner_id: dict(shadow) for owner_id, shadow in self.maps.items()}
        for v in engine.focus_vis():
            source = snapshot.get(v.id)
            if not source:
                continue
            for m_id, weight in sorted(source.items(), key=lambda kv: (-kv[1], kv[0])):
                m = engine.entities[m_id]
                for role in _ROLES:
                    v_role = getattr(v, role)
                    m_role = getattr(m, role, None)
                    if v_role is None or m_role is None:
                        continue
                    if engine.entities[m_role].demoted:
                        self._bump(engine, "diffuse", v_role, m_role, cfg.diffusion_rate * weight)

        for owner_id in sorted(self.maps):
            shadow = self.maps[owner_id]
            total = 0.0
            for target_id in sorted(shadow):
                total += shadow[target_id]
            if total > 1.0:
                scale = 1.0 / total
                for target_id in shadow:
                    shadow[target_id] *= scale

        for owner_id in sorted(self.maps):
            shadow = self.maps[owner_id]
            dust = [t for t, w in shadow.items() if w < cfg.shadow_prune]
            for t in dust:
                del shadow[t]

    # -- serialization -----------------------------------------------------------

    def to_payload(self) -> list:
        return [
            [owner_id, [[t, w] for t, w in sorted(self.maps[owner_id].items())]]
            for owner_id in sorted(self.maps)
        ]

    @classmethod
    def from_payload(cls, payload: list) -> "ShadowSet":
        out = cls()
        for owner_id, entries in payload:
            out.maps[int(owner_id)] = {int(t): float(w) for t, w in entries}
        return out
