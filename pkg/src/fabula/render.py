"""Plain-dict renderings of engine state, shared by the CLI, REPL and HTTP API.

Keeping one rendering path guarantees the REPL shows exactly what the API
returns. Weighted maps are emitted with keys in ascending order.
"""

from __future__ import annotations

from typing import List, Optional

from .engine import Engine, Instance, VerbInstance
from .errors import BadArgument


def render_instance(inst: Instance) -> dict:
    return {
        "id": inst.id,
        "overlay": dict(inst.overlay.items()),
        "salience": inst.salience,
        "created_tick": inst.created_tick,
        "last_referenced_tick": inst.last_referenced_tick,
    }


def render_vi(vi: VerbInstance) -> dict:
    return {
        "id": vi.id,
        "verbs": dict(vi.verbs.items()),
        "subject": vi.subject,
        "object": vi.object,
        "tick": vi.tick,
        "story_id": vi.story_id,
        "provenance": vi.provenance,
        "salience": vi.salience,
    }


def render_focus(engine: Engine) -> dict:
    return {
        "instances": [render_instance(i) for i in engine.focus_instances()],
        "vis": [render_vi(v) for v in engine.focus_vis()],
    }


def render_shadow(engine: Engine, owner_id: int) -> dict:
    entries = engine.shadows.get(engine, owner_id)
    return {
        "owner": owner_id,
        "entries": [{"id": target, "weight": weight} for target, weight in entries],
    }


def render_candidates(candidates) -> List[dict]:
    return [c.render() for c in candidates]


def render_memory(engine: Engine, lo: Optional[int] = None, hi: Optional[int] = None) -> dict:
    if lo is not None and hi is not None and lo > hi:
        raise BadArgument(f"empty id range: from={lo} to={hi}")
    records = []
    for entity_id in engine.log:
        if lo is not None and entity_id < lo:
            continue
        if hi is not None and entity_id > hi:
            continue
        records.append(engine.entities[entity_id].to_payload())
    return {"records": records}
