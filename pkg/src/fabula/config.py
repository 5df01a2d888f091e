"""Engine configuration: every free parameter of the reasoning dynamics.

Defaults are the shipped operating point. ``oracle_mode`` is a preset that
turns off decay, diffusion and structural damping so continuation scores
become exact successor frequencies; the equivalence tests rely on it.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass

from .errors import ConfigError

_INT_FIELDS = {"continuation_window", "successor_depth"}

# (0, 1] multiplicative rates; diffusion_rate additionally admits 0 because
# the oracle preset disables diffusion outright.
_RATE_FIELDS = {"focus_decay", "shadow_decay", "argument_spill", "successor_discount"}
_UNIT_FIELDS = {
    "focus_demote",
    "verb_match_floor",
    "consistency_floor",
    "diffusion_rate",
    "shadow_prune",
    "cluster_threshold",
    "instance_threshold",
    "matched_threshold",
    "reference_threshold",
    "attribute_floor",
}


@dataclass(frozen=True)
class EngineConfig:
    focus_decay: float = 0.9           # per-insertion salience multiplier for focus entities
    focus_demote: float = 0.1          # salience floor below which an entity leaves the focus
    shadow_decay: float = 0.95         # per-tick multiplier on all shadow weights
    verb_match_floor: float = 0.2      # minimum verb similarity for a spike to fire
    consistency_floor: float = 0.05    # floor for structural role-consistency factors
    argument_spill: float = 0.5        # fraction of a spike passed through to role shadows
    diffusion_rate: float = 0.1        # per-tick diffusion along role links
    shadow_prune: float = 1e-6         # weights below this are dropped
    continuation_window: int = 5       # how many most-recent focus events vote
    successor_depth: int = 3           # how far ahead successor links are followed
    successor_discount: float = 0.5    # per-step discount on deeper successors
    cluster_threshold: float = 0.5     # verb similarity needed to join a candidate cluster
    instance_threshold: float = 0.1    # reverse-mapping weight needed to reuse a focus instance
    matched_threshold: float = 0.05    # shadow weight at which a memory event counts as present
    reference_threshold: float = 0.1   # similarity needed for 'the' to resolve
    attribute_floor: float = 0.1       # minimum weight kept when copying attributes

    def __post_init__(self) -> None:
        for name in _RATE_FIELDS:
            v = getattr(self, name)
            if not (0.0 < v <= 1.0):
                raise ConfigError(f"{name} must be in (0,1], got {v!r}")
        for name in _UNIT_FIELDS:
            v = getattr(self, name)
            if not (0.0 <= v <= 1.0):
                raise ConfigError(f"{name} must be in [0,1], got {v!r}")
        for name in _INT_FIELDS:
            v = getattr(self, name)
            if not (isinstance(v, int) and v >= 1):
                raise ConfigError(f"{name} must be an integer >= 1, got {v!r}")

    def replace(self, **changes) -> "EngineConfig":
        return dataclasses.replace(self, **changes)

    @classmethod
    def oracle_mode(cls, base: "EngineConfig" | None = None) -> "EngineConfig":
        """Preset under which continuation scores equal successor frequencies."""
        base = base or cls()
        return base.replace(
            shadow_decay=1.0,
            diffusion_rate=0.0,
            argument_spill=1.0,
            consistency_floor=1.0,
            verb_match_floor=0.5,
            continuation_window=1,
            successor_depth=1,
        )

    def to_payload(self) -> dict:
        return dataclasses.asdict(self)

    @classmethod
    def from_payload(cls, payload: dict) -> "EngineConfig":
        return cls(**payload)


def load_config(source: str, base: EngineConfig | None = None) -> EngineConfig:
    """Parse ``key = value`` lines. Unknown keys are errors, to catch typos."""
    base = base or EngineConfig()
    known = {f.name for f in dataclasses.fields(EngineConfig)}
    changes = {}
    for lineno, raw in enumerate(source.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value'")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in known:
            raise ConfigError(f"line {lineno}: unknown config key {key!r}")
        try:
            changes[key] = int(value) if key in _INT_FIELDS else float(value)
        except ValueError:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from None
    return base.replace(**changes)
