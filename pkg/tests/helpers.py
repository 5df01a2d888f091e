"""Shared test utilities: corpus builders and independent scoring oracles.

The oracles here scan raw entity records and never touch the engine's
scoring path, so score comparisons are genuinely two-sided.
"""

from __future__ import annotations

import hashlib
import json
import random
from collections import Counter, defaultdict
from typing import Dict, List, Tuple

from fabula import Engine, VerbInstance

RESTAURANT_NOUNS = ["customer", "guest", "student", "doctor", "artist"]
RESTAURANT_VERBS = ["enters", "orders", "eats", "pays", "leaves"]


def restaurant_dictionary_text() -> str:
    lines = [f"concept {n}" for n in RESTAURANT_NOUNS]
    lines += ["concept hungry"]
    lines += [f"verb {v}" for v in RESTAURANT_VERBS]
    lines += ["verb argues"]
    return "\n".join(lines)


def story_lines(noun: str, verbs: List[str]) -> List[str]:
    lines = [f"A {noun} / {verbs[0]}."]
    lines += [f"The {noun} / {v}." for v in verbs[1:]]
    lines.append("----")
    return lines


def narrate_stories(engine: Engine, stories: List[Tuple[str, List[str]]]) -> None:
    text = []
    for noun, verbs in stories:
        text.extend(story_lines(noun, verbs))
    engine.narrate("\n".join(text))


def restaurant_stories(count: int = 20) -> List[Tuple[str, List[str]]]:
    return [(RESTAURANT_NOUNS[i % len(RESTAURANT_NOUNS)], list(RESTAURANT_VERBS)) for i in range(count)]


def single_verb(overlay) -> str:
    names = [name for name, _ in overlay.items()]
    assert len(names) == 1, f"expected a single-verb overlay, got {names}"
    return names[0]


# -- successor-frequency oracle (exhaustive scan of the memory log) ---------


def demoted_story_sequences(engine: Engine) -> Dict[int, List[VerbInstance]]:
    stories: Dict[int, List[VerbInstance]] = defaultdict(list)
    for entity_id in engine.log:
        entity = engine.entities[entity_id]
        if isinstance(entity, VerbInstance) and entity.demoted:
            stories[entity.story_id].append(entity)
    for vis in stories.values():
        vis.sort(key=lambda v: v.tick)
    return stories


def successor_frequencies(engine: Engine, verb: str) -> Tuple[Dict[str, float], int]:
    """count(verb -> X) / count(verb) for every X, plus count(verb)."""
    total = 0
    follows: Counter = Counter()
    for vis in demoted_story_sequences(engine).values():
        for index, vi in enumerate(vis):
            if verb in vi.verbs:
                total += 1
                if index + 1 < len(vis):
                    follows[single_verb(vis[index + 1].verbs)] += 1
    if total == 0:
        return {}, 0
    return {x: c / total for x, c in follows.items()}, total


def bidirectional_gap_votes(engine: Engine, before: List[str], after: List[str], depth_cap: int) -> Dict[str, float]:
    """Frequency oracle for a cloze gap.

    ``before``/``after`` are the focus verb sequences on each side of the
    gap. Each side votes with the events whose distance to the gap is within
    the depth cap: a before event at distance d counts stories where it is
    followed at offset d, an after event counts stories where it is preceded
    at offset d; votes are discounted by 0.5 per extra step and divided by
    the event's total occurrence count (shadow normalization).
    """
    votes: Dict[str, float] = Counter()
    stories = list(demoted_story_sequences(engine).values())

    def occurrences(verb: str) -> int:
        return sum(1 for vis in stories for v in vis if verb in v.verbs)

    for side, sequence in (("before", before), ("after", after)):
        for index, verb in enumerate(sequence):
            distance = len(sequence) - index if side == "before" else index + 1
            if distance > depth_cap:
                continue
            n = occurrences(verb)
            if n == 0:
                continue
            for vis in stories:
                for pos, vi in enumerate(vis):
                    if verb not in vi.verbs:
                        continue
                    neighbor = pos + distance if side == "before" else pos - distance
                    if 0 <= neighbor < len(vis):
                        votes[single_verb(vis[neighbor].verbs)] += (1.0 / n) * 0.5 ** (distance - 1)
    return dict(votes)


# -- synthetic corpora for the oracle-equivalence suite ----------------------


def synthetic_dictionary_text(n_verbs: int = 8, n_nouns: int = 5) -> str:
    lines = [f"concept n{i}" for i in range(n_nouns)]
    lines += [f"verb v{i}" for i in range(n_verbs)]
    return "\n".join(lines)


def synthetic_stories(seed: int, n_verbs: int = 8, n_nouns: int = 5) -> List[Tuple[str, List[str]]]:
    """Randomly structured stories; verbs are distinct within one story."""
    rng = random.Random(seed)
    verbs = [f"v{i}" for i in range(n_verbs)]
    nouns = [f"n{i}" for i in range(n_nouns)]
    stories = []
    for _ in range(rng.randint(3, 12)):
        length = rng.randint(2, 6)
        stories.append((rng.choice(nouns), rng.sample(verbs, length)))
    return stories


# -- independent hash-chain recomputation ------------------------------------


def recompute_memory_chain(engine: Engine) -> List[str]:
    """Rebuild the demotion hash chain from raw entity records."""
    genesis = hashlib.sha256(b"fabula-memory-chain").hexdigest()
    demoted = sorted(
        (e for e in engine.entities.values() if e.demoted),
        key=lambda e: e.demotion_index,
    )
    chain = []
    prev = genesis
    for entity in demoted:
        record = json.dumps(entity.to_payload(), sort_keys=True, separators=(",", ":"))
        prev = hashlib.sha256((prev + "\n" + record).encode("utf-8")).hexdigest()
        chain.append(prev)
    return chain
