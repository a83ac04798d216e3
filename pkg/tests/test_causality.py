import networkx as nx
import pytest

from core.causality import (CausalGraph, NodeRef, bound_guarantee, build_causal_graph, causal_future,
                            causal_graph_of, causal_past, syncausal)
from core.errors import CausalityError, HorizonExceeded
from core.network import Network, distance
from tests.conftest import line_network, star_network


def test_silent_run_reaches_only_through_null_edges(silent_pair_bundle):
    g = causal_graph_of(silent_pair_bundle, 0)
    assert not g.message_edges
    assert syncausal(g, NodeRef(0, 0), NodeRef(1, 2))
    assert not syncausal(g, NodeRef(0, 0), NodeRef(1, 1))
    assert syncausal(g, NodeRef(0, 0), NodeRef(0, 5))


def test_fast_message_reaches_early(pair_bundle):
    g = build_causal_graph(pair_bundle[0])
    assert syncausal(g, NodeRef(0, 0), NodeRef(1, 1))
    assert not g.null_edges


def test_reachability_matches_networkx(pair_bundle):
    for index in (0, 555, 2047):
        g = causal_graph_of(pair_bundle, index)
        graph = g.to_networkx()
        for node in graph.nodes:
            assert causal_future(g, node) == nx.descendants(graph, node) | {node}
            assert causal_past(g, node) == nx.ancestors(graph, node) | {node}


def test_past_and_future_are_dual(pair_bundle):
    g = causal_graph_of(pair_bundle, 777)
    nodes = [NodeRef(i, t) for t in range(6) for i in range(2)]
    for a in nodes:
        for b in nodes:
            assert (a in causal_past(g, b)) == (b in causal_future(g, a)) == syncausal(g, a, b)


def test_bound_guarantee_is_realised_in_every_run(pair_bundle):
    net = pair_bundle.context.network
    nodes = [NodeRef(i, t) for t in range(6) for i in range(2)]
    for index in range(0, len(pair_bundle), 31):
        g = causal_graph_of(pair_bundle, index)
        for a in nodes:
            for b in nodes:
                if bound_guarantee(net, a, b):
                    assert syncausal(g, a, b)


def test_syncausality_moves_forward(pair_bundle):
    g = causal_graph_of(pair_bundle, 1000)
    for t in range(6):
        for i in range(2):
            later = {node for node in causal_future(g, NodeRef(i, t)) if node != NodeRef(i, t)}
            assert all(node.time > t for node in later)


def test_bound_guarantee_uses_distances():
    net = line_network()
    assert bound_guarantee(net, NodeRef(0, 0), NodeRef(2, 3))
    assert not bound_guarantee(net, NodeRef(0, 0), NodeRef(2, 2))
    assert bound_guarantee(net, NodeRef(1, 4), NodeRef(1, 4))


@pytest.mark.parametrize("net", [line_network(), star_network(), Network(3, {(0, 1): 3, (1, 2): 1, (0, 2): 5})])
def test_every_channel_guarantees_delivery_within_its_bound(net):
    for (i, j), bound in net.channels.items():
        assert distance(net, i, j) <= bound
        assert bound_guarantee(net, NodeRef(i, 0), NodeRef(j, bound))


def test_relayed_path_beats_a_slow_channel():
    net = Network(3, {(0, 1): 3, (1, 2): 1, (0, 2): 5})
    assert distance(net, 0, 2) == 4 < net.bound(0, 2)
    assert bound_guarantee(net, NodeRef(0, 0), NodeRef(2, 4))


def test_bound_guarantee_is_false_when_unreachable():
    net = Network(2, {(0, 1): 1})
    assert not bound_guarantee(net, NodeRef(1, 0), NodeRef(0, 9))


def test_edges_must_move_forward():
    with pytest.raises(CausalityError):
        CausalGraph(2, 3, [(NodeRef(0, 1), NodeRef(1, 1))])


def test_nodes_outside_the_horizon():
    g = CausalGraph(2, 3)
    with pytest.raises(HorizonExceeded):
        g.index(NodeRef(0, 4))
    with pytest.raises(HorizonExceeded):
        syncausal(g, NodeRef(2, 0), NodeRef(0, 1))


def test_locality_edges_only():
    g = CausalGraph(2, 2)
    assert causal_future(g, NodeRef(0, 0)) == {NodeRef(0, 0), NodeRef(0, 1), NodeRef(0, 2)}
    assert str(NodeRef(1, 2)) == "⟨1,2⟩"
