"""Core state: instances, verb instances, focus, episodic memory, clock.

The engine is a single logical writer. Every mutation goes through one of
``create_instance``, ``insert_vi``, ``story_break`` or ``load``; queries
observe a consistent state between those calls. There is no randomness
anywhere, so identical inputs always produce identical state hashes.

Episodic memory is append-only: entities are logged at creation and frozen
at demotion. A running hash chain over demoted records makes retroactive
modification detectable.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Union

from .config import EngineConfig
from .dictionary import CONCEPT, VERB, Dictionary, Overlay
from .errors import (
    CorruptSnapshot,
    EngineError,
    FormatVersionMismatch,
    KindMismatch,
    NarrationError,
    ParseError,
    UnknownInstance,
)
from .parser import (
    Directive,
    NewInstance,
    SceneBreak,
    SentenceAst,
    ViTemplate,
    parse_line,
    resolve,
    strip_comment,
)
from .shadows import ShadowSet

FORMAT_VERSION = 1

NARRATED = "narrated"
CONFABULATED = "confabulated"


@dataclass
class Instance:
    """A participant entity. The overlay is frozen at creation."""

    id: int
    overlay: Overlay
    created_tick: int
    last_referenced_tick: int
    salience: float = 1.0
    salience_accum: float = 0.0
    demoted: bool = False
    memory_salience: Optional[float] = None
    demotion_index: Optional[int] = None

    def to_payload(self) -> dict:
        return {
            "type": "instance",
            "id": self.id,
            "overlay": [[n, w] for n, w in self.overlay.items()],
            "created_tick": self.created_tick,
            "last_referenced_tick": self.last_referenced_tick,
            "salience": self.salience,
            "salience_accum": self.salience_accum,
            "demoted": self.demoted,
            "memory_salience": self.memory_salience,
            "demotion_index": self.demotion_index,
        }


@dataclass
class VerbInstance:
    """The atomic event record: verb overlay plus role-bound instances at a tick."""

    id: int
    verbs: Overlay
    subject: int
    object: Optional[int]
    tick: int
    story_id: int
    story_pos: int
    provenance: str = NARRATED
    salience: float = 1.0
    salience_accum: float = 0.0
    demoted: bool = False
    memory_salience: Optional[float] = None
    demotion_index: Optional[int] = None

    def roles(self) -> List[tuple]:
        out = [("subject", self.subject)]
        if self.object is not None:
            out.append(("object", self.object))
        return out

    def to_payload(self) -> dict:
        return {
            "type": "vi",
            "id": self.id,
            "verbs": [[n, w] for n, w in self.verbs.items()],
            "subject": self.subject,
            "object": self.object,
            "tick": self.tick,
            "story_id": self.story_id,
            "story_pos": self.story_pos,
            "provenance": self.provenance,
            "salience": self.salience,
            "salience_accum": self.salience_accum,
            "demoted": self.demoted,
            "memory_salience": self.memory_salience,
            "demotion_index": self.demotion_index,
        }


Entity = Union[Instance, VerbInstance]


def _canonical_json(value) -> str:
    return json.dumps(value, sort_keys=True, separators=(",", ":"), allow_nan=False)


_CHAIN_GENESIS = hashlib.sha256(b"fabula-memory-chain").hexdigest()


class Engine:
    """Narrative engine over one dictionary and one configuration."""

    def __init__(self, dictionary: Dictionary, config: EngineConfig | None = None):
        self.dictionary = dictionary
        self.config = config or EngineConfig()
        self.tick = 0
        self.story_id = 0
        self.next_id = 1
        self.entities: Dict[int, Entity] = {}
        self.log: List[int] = []  # creation order
        self.story_vis: Dict[int, List[int]] = {}  # story id -> vi ids in tick order
        self.focus_instance_ids: List[int] = []  # creation order
        self.focus_vi_ids: List[int] = []  # tick order
        self.memory_chain: List[str] = []  # running hash chain over demoted records
        self._demoted_order: List[int] = []
        self.shadows = ShadowSet()
        self.revision = 0  # bumped on every mutation; invalidates candidates
        self.trace = None  # optional callable(tick, kind, owner, memory, delta, weight)

    # -- views -------------------------------------------------------------

    def entity(self, entity_id: int) -> Optional[Entity]:
        return self.entities.get(entity_id)

    def focus_instances(self) -> List[Instance]:
        return [self.entities[i] for i in self.focus_instance_ids]

    def focus_vis(self) -> List[VerbInstance]:
        return [self.entities[i] for i in self.focus_vi_ids]

    def in_focus(self, entity_id: int) -> bool:
        e = self.entities.get(entity_id)
        return e is not None and not e.demoted

    def memory_vis(self) -> List[VerbInstance]:
        """Demoted verb instances in tick order."""
        out = [
            self.entities[i]
            for i in self.log
            if isinstance(self.entities[i], VerbInstance) and self.entities[i].demoted
        ]
        out.sort(key=lambda v: v.tick)
        return out

    def story_neighbor(self, vi: VerbInstance, offset: int) -> Optional[VerbInstance]:
        """The VI ``offset`` steps away in the same story, or None. Links never cross breaks."""
        chain = self.story_vis.get(vi.story_id, [])
        pos = vi.story_pos + offset
        if 0 <= pos < len(chain):
            return self.entities[chain[pos]]
        return None

    def _referenced_instance_ids(self) -> set:
        refs = set()
        for vid in self.focus_vi_ids:
            vi = self.entities[vid]
            refs.add(vi.subject)
            if vi.object is not None:
                refs.add(vi.object)
        return refs

    # -- mutations ----------------------------------------------------------

    def create_instance(self, overlay: Overlay) -> int:
        """Create a participant with salience 1.0; it enters the focus immediately."""
        if overlay.kind != CONCEPT:
            raise KindMismatch(f"instance overlay must hold concepts, got {overlay.kind}s")
        # validate members against the dictionary
        checked = self.dictionary.overlay(CONCEPT, overlay.weights())
        inst = Instance(
            id=self.next_id,
            overlay=checked,
            created_tick=self.tick,
            last_referenced_tick=self.tick,
        )
        self.next_id += 1
        self.entities[inst.id] = inst
        self.log.append(inst.id)
        self.focus_instance_ids.append(inst.id)
        self.shadows.create(inst.id)
        self.revision += 1
        return inst.id

    def _resolve_role(self, ref: Union[int, NewInstance, None]) -> Optional[int]:
        if ref is None:
            return None
        if isinstance(ref, NewInstance):
            return self.create_instance(ref.overlay)
        if not self.in_focus(ref) or not isinstance(self.entities.get(ref), Instance):
            raise UnknownInstance(f"no focus instance with id {ref}")
        return ref

    def insert_vi(self, template: ViTemplate, provenance: str = NARRATED) -> int:
        """Insert exactly one verb instance; runs the full per-tick pipeline.

        Fixed order: create roles, advance the clock, create the VI, decay,
        demote, accumulate residency salience, spike, diffuse, invalidate
        candidate caches.
        """
        if template.verbs.kind != VERB:
            raise KindMismatch("template verbs must be a verb overlay")
        subject_id = self._resolve_role(template.subject_ref)
        object_id = self._resolve_role(template.object_ref)

        self.tick += 1
        chain = self.story_vis.setdefault(self.story_id, [])
        vi = VerbInstance(
            id=self.next_id,
            verbs=template.verbs,
            subject=subject_id,
            object=object_id,
            tick=self.tick,
            story_id=self.story_id,
            story_pos=len(chain),
            provenance=provenance,
        )
        self.next_id += 1
        self.entities[vi.id] = vi
        self.log.append(vi.id)
        chain.append(vi.id)
        self.focus_vi_ids.append(vi.id)
        self.shadows.create(vi.id)
        for _, inst_id in vi.roles():
            self.entities[inst_id].last_referenced_tick = self.tick

        # (1) decay: every other focus VI, and every standalone instance
        for vid in self.focus_vi_ids:
            if vid != vi.id:
                self.entities[vid].salience *= self.config.focus_decay
        referenced = self._referenced_instance_ids()
        for iid in self.focus_instance_ids:
            if iid not in referenced:
                self.entities[iid].salience *= self.config.focus_decay

        # (2) demotion below the salience floor
        to_demote = [
            v for v in self.focus_vi_ids if self.entities[v].salience < self.config.focus_demote
        ]
        surviving = set(self.focus_vi_ids) - set(to_demote)
        still_referenced = set()
        for vid in surviving:
            fv = self.entities[vid]
            still_referenced.add(fv.subject)
            if fv.object is not None:
                still_referenced.add(fv.object)
        for iid in self.focus_instance_ids:
            inst = self.entities[iid]
            if iid not in still_referenced and inst.salience < self.config.focus_demote:
                to_demote.append(iid)
        for eid in sorted(to_demote):
            self._demote(eid)

        # residency salience for everything still in focus at this tick
        for eid in self.focus_vi_ids + self.focus_instance_ids:
            e = self.entities[eid]
            e.salience_accum += e.salience

        # (3) spike, (4) diffusion
        self.shadows.spike(self, vi)
        self.shadows.tick(self)

        # (5) candidate caches invalidated
        self.revision += 1
        return vi.id

    def _demote(self, entity_id: int) -> None:
        e = self.entities[entity_id]
        e.demoted = True
        e.memory_salience = e.salience_accum
        e.demotion_index = len(self._demoted_order)
        self._demoted_order.append(entity_id)
        prev = self.memory_chain[-1] if self.memory_chain else _CHAIN_GENESIS
        self.memory_chain.append(_chain_hash(prev, e.to_payload()))
        if isinstance(e, VerbInstance):
            self.focus_vi_ids.remove(entity_id)
        else:
            self.focus_instance_ids.remove(entity_id)
        self.shadows.discard(entity_id)

    def story_break(self) -> None:
        """Demote every focus entity and start a new story. No tick passes."""
        for eid in sorted(self.focus_vi_ids + self.focus_instance_ids):
            self._demote(eid)
        self.story_id += 1
        self.revision += 1

    # -- narration ----------------------------------------------------------

    def narrate_line(self, line: str) -> Optional[int]:
        """Execute one pidgin line: a sentence inserts a VI, '----' breaks the story.

        Returns the inserted VI id, or None for a scene break. Directives are
        rejected here; they belong to the scenario runner and the REPL.
        """
        outcome = parse_line(line)
        if isinstance(outcome, SceneBreak):
            self.story_break()
            return None
        if isinstance(outcome, Directive):
            raise ParseError(f"directive !{outcome.name} is not allowed in narration", 1)
        template = resolve(
            outcome, self.focus_instances(), self.dictionary, self.config.reference_threshold
        )
        return self.insert_vi(template)

    def narrate(self, text: str) -> List[int]:
        """Execute pidgin lines strictly in order; comments and blanks are skipped.

        On the first error, prior insertions persist and a NarrationError
        carrying the 1-based line number is raised.
        """
        inserted: List[int] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = strip_comment(raw)
            if not line.strip():
                continue
            try:
                vi_id = self.narrate_line(line)
            except EngineError as exc:
                raise NarrationError(lineno, exc, inserted) from exc
            if vi_id is not None:
                inserted.append(vi_id)
        return inserted

    # -- reasoning facade ----------------------------------------------------

    def build_continuations(self, top: int = 5):
        from .hls import build_continuations

        return build_continuations(self, top)

    def instantiate(self, candidate) -> int:
        from .hls import instantiate

        return instantiate(self, candidate)

    def confabulate(self, steps: int) -> List[int]:
        from .hls import confabulate

        return confabulate(self, steps)

    def cloze_infer(self, position: int, top: int = 5):
        from .hls import cloze_infer

        return cloze_infer(self, position, top)

    # -- hashing and persistence ----------------------------------------------

    def state_payload(self) -> dict:
        return {
            "format_version": FORMAT_VERSION,
            "config": self.config.to_payload(),
            "dictionary": self.dictionary.to_payload(),
            "tick": self.tick,
            "story_id": self.story_id,
            "next_id": self.next_id,
            "entities": [self.entities[i].to_payload() for i in sorted(self.entities)],
            "shadows": self.shadows.to_payload(),
        }

    def state_hash(self) -> str:
        """SHA-256 over the canonical state serialization. Equal states, equal hashes."""
        doc = _canonical_json(self.state_payload())
        return hashlib.sha256(doc.encode("utf-8")).hexdigest()

    def snapshot(self, path) -> None:
        doc = _canonical_json(self.state_payload())
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(doc)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "Engine":
        try:
            with open(path, "r", encoding="utf-8") as fh:
                payload = json.load(fh)
        except (OSError, ValueError) as exc:
            raise CorruptSnapshot(f"cannot read snapshot: {exc}") from exc
        if not isinstance(payload, dict) or "format_version" not in payload:
            raise CorruptSnapshot("snapshot has no format_version field")
        if payload["format_version"] != FORMAT_VERSION:
            raise FormatVersionMismatch(
                f"snapshot format {payload['format_version']!r}, engine supports {FORMAT_VERSION}"
            )
        try:
            return cls._from_payload(payload)
        except (KeyError, TypeError, ValueError) as exc:
            raise CorruptSnapshot(f"malformed snapshot: {exc!r}") from exc

    @classmethod
    def _from_payload(cls, payload: dict) -> "Engine":
        dictionary = Dictionary.from_payload(payload["dictionary"])
        config = EngineConfig.from_payload(payload["config"])
        engine = cls(dictionary, config)
        engine.tick = int(payload["tick"])
        engine.story_id = int(payload["story_id"])
        engine.next_id = int(payload["next_id"])
        for record in payload["entities"]:
            entity = _entity_from_payload(record)
            engine.entities[entity.id] = entity
            engine.log.append(entity.id)
            if isinstance(entity, VerbInstance):
                engine.story_vis.setdefault(entity.story_id, []).append(entity.id)
                if not entity.demoted:
                    engine.focus_vi_ids.append(entity.id)
            elif not entity.demoted:
                engine.focus_instance_ids.append(entity.id)
        for vis in engine.story_vis.values():
            vis.sort(key=lambda i: engine.entities[i].tick)
        engine.focus_vi_ids.sort(key=lambda i: engine.entities[i].tick)
        engine.shadows = ShadowSet.from_payload(payload["shadows"])
        demoted = sorted(
            (e for e in engine.entities.values() if e.demoted),
            key=lambda e: e.demotion_index,
        )
        prev = _CHAIN_GENESIS
        for e in demoted:
            engine._demoted_order.append(e.id)
            prev = _chain_hash(prev, e.to_payload())
            engine.memory_chain.append(prev)
        engine.revision += 1
        return engine


def _chain_hash(prev_hex: str, record: dict) -> str:
    body = prev_hex + "\n" + _canonical_json(record)
    return hashlib.sha256(body.encode("utf-8")).hexdigest()


def _overlay_from_pairs(kind: str, pairs) -> Overlay:
    return Overlay(kind, {name: float(w) for name, w in pairs})


def _entity_from_payload(record: dict) -> Entity:
    if record["type"] == "instance":
        return Instance(
            id=int(record["id"]),
            overlay=_overlay_from_pairs(CONCEPT, record["overlay"]),
            created_tick=int(record["created_tick"]),
            last_referenced_tick=int(record["last_referenced_tick"]),
            salience=float(record["salience"]),
            salience_accum=float(record["salience_accum"]),
            demoted=bool(record["demoted"]),
            memory_salience=record["memory_salience"],
            demotion_index=record["demotion_index"],
        )
    if record["type"] == "vi":
        obj = record["object"]
        return VerbInstance(
            id=int(record["id"]),
            verbs=_overlay_from_pairs(VERB, record["verbs"]),
            subject=int(record["subject"]),
            object=None if obj is None else int(obj),
            tick=int(record["tick"]),
            story_id=int(record["story_id"]),
            story_pos=int(record["story_pos"]),
            provenance=record["provenance"],
            salience=float(record["salience"]),
            salience_accum=float(record["salience_accum"]),
            demoted=bool(record["demoted"]),
            memory_salience=record["memory_salience"],
            demotion_index=record["demotion_index"],
        )
    raise ValueError(f"unknown entity type {record['type']!r}")
