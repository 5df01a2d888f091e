"""Deterministic narrative reasoning engine.

Stories told in a controlled pidgin language become verb instances in a
salience-decayed focus; demoted entities accumulate in an append-only
episodic memory; shadows tie the focus back to memory and drive
continuation prediction, confabulation, recall and cloze inference.
"""

from .config import EngineConfig, load_config
from .dictionary import CONCEPT, VERB, Dictionary, Overlay, load_dictionary
from .engine import CONFABULATED, NARRATED, Engine, Instance, VerbInstance
from .errors import EngineError
from .hls import HlsCandidate, build_continuations, cloze_infer, confabulate, instantiate
from .parser import (
    Directive,
    NewInstance,
    NounPhrase,
    SceneBreak,
    SentenceAst,
    ViTemplate,
    parse_line,
    pretty,
    resolve,
)

__version__ = "0.1.0"

__all__ = [
    "CONCEPT",
    "CONFABULATED",
    "Dictionary",
    "Directive",
    "Engine",
    "EngineConfig",
    "EngineError",
    "HlsCandidate",
    "Instance",
    "NARRATED",
    "NewInstance",
    "NounPhrase",
    "Overlay",
    "SceneBreak",
    "SentenceAst",
    "VERB",
    "VerbInstance",
    "ViTemplate",
    "build_continuations",
    "cloze_infer",
    "confabulate",
    "instantiate",
    "load_config",
    "load_dictionary",
    "parse_line",
    "pretty",
    "resolve",
]
