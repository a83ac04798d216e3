import itertools

import pytest

from core.causality import NodeRef, bound_guarantee, causal_graph_of, syncausal
from core.errors import HorizonExceeded, IntervalError, StructureQueryError
from core.network import NEVER
from core.structures import (StructureKind, StructureQuery, earliest_formation_time, find_broom, find_centibroom,
                             find_centipede, validate_witness)

ALICE, BOB = 0, 1


def _centibroom_exists(g, net, origin, groups, t, t_prime) -> bool:
    """Literal search over every node tuple"""
    window = [NodeRef(i, s) for s in range(t, t_prime + 1) for i in range(net.n_agents)]
    start = NodeRef(origin, t)
    for chain in itertools.product(window, repeat=len(groups)):
        nodes = (start,) + chain
        if not all(syncausal(g, a, b) for a, b in zip(nodes, nodes[1:])):
            continue
        if all(bound_guarantee(net, theta, NodeRef(i, t_prime))
               for theta, group in zip(chain, groups) for i in group):
            return True
    return False


def _centipede_exists(g, net, agents, t, t_prime) -> bool:
    window = [NodeRef(i, s) for s in range(t, t_prime + 1) for i in range(net.n_agents)]
    start = NodeRef(agents[0], t)
    end = NodeRef(agents[-1], t_prime)
    for middle in itertools.product(window, repeat=len(agents) - 2):
        nodes = (start,) + middle + (end,)
        if not all(syncausal(g, a, b) for a, b in zip(nodes, nodes[1:])):
            continue
        if all(bound_guarantee(net, theta, NodeRef(i, t_prime)) for theta, i in zip(middle, agents[1:-1])):
            return True
    return False


# ==================== SILENT RUNS ====================

def test_centipede_needs_the_bound_in_a_silent_run(silent_pair_bundle):
    g = causal_graph_of(silent_pair_bundle, 0)
    net = silent_pair_bundle.context.network
    assert find_centipede(g, net, [ALICE, BOB], 0, 1) is None
    witness = find_centipede(g, net, [ALICE, BOB], 0, 2)
    assert witness is not None
    assert witness.nodes == (NodeRef(ALICE, 0), NodeRef(BOB, 2))
    assert validate_witness(g, net, witness) == []


def test_never_when_the_horizon_is_too_short(silent_pair_bundle):
    g = causal_graph_of(silent_pair_bundle, 1)
    net = silent_pair_bundle.context.network
    assert earliest_formation_time(g, net, ALICE, [frozenset({BOB})], 4) is NEVER
    assert earliest_formation_time(g, net, ALICE, [frozenset({BOB})], 0) == 2


# ==================== AGAINST THE LITERAL DEFINITION ====================

GROUPS = [frozenset({ALICE}), frozenset({BOB}), frozenset({ALICE, BOB})]


@pytest.mark.parametrize("index", [0, 1, 700, 1500, 2047])
def test_centibroom_search_matches_literal_definition(pair_bundle, index):
    g = causal_graph_of(pair_bundle, index)
    net = pair_bundle.context.network
    for k in (1, 2):
        for groups in itertools.product(GROUPS, repeat=k):
            for t_prime in range(0, 6):
                witness = find_centibroom(g, net, ALICE, groups, 0, t_prime)
                assert (witness is not None) == _centibroom_exists(g, net, ALICE, groups, 0, t_prime)
                if witness is not None:
                    assert validate_witness(g, net, witness) == []


@pytest.mark.parametrize("index", [0, 3, 1024, 2047])
def test_centipede_search_matches_literal_definition(pair_bundle, index):
    g = causal_graph_of(pair_bundle, index)
    net = pair_bundle.context.network
    for length in (2, 3, 4):
        for tail in itertools.product((ALICE, BOB), repeat=length - 1):
            agents = [ALICE, *tail]
            for t_prime in range(1, 6):
                witness = find_centipede(g, net, agents, 1, t_prime)
                assert (witness is not None) == _centipede_exists(g, net, agents, 1, t_prime)
                if witness is not None:
                    assert validate_witness(g, net, witness) == []


def test_star_brooms_match_literal_definition(star_bundle):
    net = star_bundle.context.network
    everyone = frozenset(range(3))
    for index in range(len(star_bundle)):
        g = causal_graph_of(star_bundle, index)
        for origin in range(3):
            for t_prime in range(0, 6):
                found = find_broom(g, net, origin, everyone, 0, t_prime)
                assert (found is not None) == _centibroom_exists(g, net, origin, [everyone], 0, t_prime)


# ==================== PROPERTIES ====================

def test_presence_is_monotone_in_the_end_time(pair_bundle):
    net = pair_bundle.context.network
    groups = [frozenset({BOB}), frozenset({ALICE, BOB})]
    for index in range(0, len(pair_bundle), 101):
        g = causal_graph_of(pair_bundle, index)
        present = [find_centibroom(g, net, ALICE, groups, 0, tp) is not None for tp in range(6)]
        assert present == sorted(present)
        first = earliest_formation_time(g, net, ALICE, groups, 0)
        assert first is NEVER if not any(present) else first == present.index(True)


def test_broom_kind_and_description(pair_bundle):
    g = causal_graph_of(pair_bundle, 0)
    net = pair_bundle.context.network
    witness = find_broom(g, net, ALICE, frozenset({ALICE, BOB}), 0, 2)
    assert witness.kind is StructureKind.BROOM
    assert witness.k == 1
    assert {target for _, target in witness.legs()} == {NodeRef(ALICE, 2), NodeRef(BOB, 2)}
    assert witness.describe(net).startswith("broom [{alice,bob}] in 0..2")


def test_tampered_witness_is_rejected(pair_bundle):
    g = causal_graph_of(pair_bundle, 0)
    net = pair_bundle.context.network
    witness = find_centipede(g, net, [ALICE, BOB, ALICE], 0, 3)
    broken = type(witness)(witness.kind, witness.origin,
                           witness.nodes[:-1] + (NodeRef(BOB, 3),), witness.interval, witness.targets)
    assert validate_witness(g, net, broken)


def test_queries_dispatch_on_kind(pair_bundle):
    g = causal_graph_of(pair_bundle, 0)
    net = pair_bundle.context.network
    query = StructureQuery(StructureKind.CENTIPEDE, BOB, (frozenset({ALICE}),), 0, 4)
    assert query.search(g, net).kind is StructureKind.CENTIPEDE
    with pytest.raises(StructureQueryError, match="exactly one group"):
        StructureQuery(StructureKind.BROOM, BOB, (frozenset({ALICE}), frozenset({BOB})), 0, 4)


@pytest.mark.parametrize("groups", [
    (frozenset({ALICE, BOB}),),
    (frozenset({ALICE}), frozenset({ALICE, BOB})),
])
def test_centipede_levels_hold_one_agent(groups):
    with pytest.raises(StructureQueryError, match="one agent per level"):
        StructureQuery(StructureKind.CENTIPEDE, BOB, groups, 0, 4)


# ==================== ERRORS ====================

def test_query_errors(pair_bundle):
    g = causal_graph_of(pair_bundle, 0)
    net = pair_bundle.context.network
    with pytest.raises(IntervalError):
        find_centibroom(g, net, ALICE, [frozenset({BOB})], 3, 2)
    with pytest.raises(HorizonExceeded):
        find_centibroom(g, net, ALICE, [frozenset({BOB})], 0, 6)
    with pytest.raises(StructureQueryError):
        find_centibroom(g, net, ALICE, [], 0, 2)
    with pytest.raises(StructureQueryError):
        find_centibroom(g, net, ALICE, [frozenset()], 0, 2)
    with pytest.raises(StructureQueryError):
        find_centipede(g, net, [ALICE], 0, 2)
