"""
Shared fixtures: reference networks, contexts and bundles
"""

from pathlib import Path

import pytest

from core.network import Network, load_network
from core.simulator import (ContextParams, InputSlot, build_system, full_information_protocol,
                            silent_protocol)
from utils.scenario_loader import load_scenario

SCENARIO_DIR = Path(__file__).resolve().parent.parent / "data" / "scenarios"


def pair_network(bound: int = 2) -> Network:
    return load_network({"agents": 2, "names": ["alice", "bob"], "links": [["alice", "bob", bound]]})


def star_network() -> Network:
    return load_network({
        "agents": 3,
        "names": ["hub", "left", "right"],
        "links": [["hub", "left", 1], ["hub", "right", 1]],
    })


def line_network() -> Network:
    return load_network({"agents": 3, "names": ["A", "B", "C"], "links": [["A", "B", 2], ["B", "C", 1]]})


def ring_network(size: int = 4) -> Network:
    return load_network({"agents": size, "links": [[i, (i + 1) % size, 1] for i in range(size)]})


@pytest.fixture(scope="session")
def scenario_dir() -> Path:
    return SCENARIO_DIR


@pytest.fixture
def load():
    """Fresh scenario per call; scenarios cache their bundles"""
    return lambda name: load_scenario(SCENARIO_DIR / f"{name}.json")


@pytest.fixture(scope="session")
def pair_ctx() -> ContextParams:
    return ContextParams(pair_network(), 5, (InputSlot("go", 0, 0),))


@pytest.fixture(scope="session")
def star_ctx() -> ContextParams:
    return ContextParams(star_network(), 5, (InputSlot("e", 0, 0),))


@pytest.fixture(scope="session")
def line_ctx() -> ContextParams:
    return ContextParams(line_network(), 6, (InputSlot("e", 0, 0),))


@pytest.fixture(scope="session")
def pair_bundle(pair_ctx):
    return build_system(full_information_protocol(), pair_ctx)


@pytest.fixture(scope="session")
def star_bundle(star_ctx):
    return build_system(full_information_protocol(), star_ctx)


@pytest.fixture(scope="session")
def silent_pair_bundle(pair_ctx):
    return build_system(silent_protocol(), pair_ctx)
