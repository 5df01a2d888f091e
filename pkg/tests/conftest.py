from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from fabula import Engine, EngineConfig, load_dictionary

from helpers import restaurant_dictionary_text


@pytest.fixture
def demo_dictionary():
    return load_dictionary(
        """
        concept man
        concept woman
        concept person
        concept dog
        concept cat
        concept angry
        verb exists
        verb waves
        verb sits
        verb barks
        verb bites
        verb flees
        overlap man person 0.7
        overlap woman person 0.7
        overlap dog cat 0.3
        """
    )


@pytest.fixture
def restaurant_dictionary():
    return load_dictionary(restaurant_dictionary_text())


@pytest.fixture
def engine(demo_dictionary):
    return Engine(demo_dictionary)


@pytest.fixture
def oracle_engine(restaurant_dictionary):
    return Engine(restaurant_dictionary, EngineConfig.oracle_mode())
