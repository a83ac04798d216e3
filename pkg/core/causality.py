"""
Syncausality - core/causality.py
Node graph of a run with send-receive and null-message edges, reachability
closures as integer bitsets, and the run-independent bound guarantee
"""

import logging
import weakref
from typing import FrozenSet, Iterable, Iterator, List, NamedTuple, Tuple

import networkx as nx

from core.errors import CausalityError, HorizonExceeded
from core.network import UNREACHABLE, Network
from core.simulator import Run, SystemBundle

logger = logging.getLogger(__name__)


class NodeRef(NamedTuple):
    """⟨agent, time⟩"""
    agent: int
    time: int

    def __str__(self) -> str:
        return f"⟨{self.agent},{self.time}⟩"


Edge = Tuple[NodeRef, NodeRef]


class CausalGraph:
    """Explicit edges plus implicit locality edges ⟨i,t⟩ → ⟨i,t+1⟩

    Node ⟨i,t⟩ has index t*n + i, so lower bits are earlier nodes and the
    lowest set bit of a mask is its least node by (time, agent).
    """

    def __init__(self, n_agents: int, horizon: int, message_edges: Iterable[Edge] = (),
                 null_edges: Iterable[Edge] = ()):
        self.n_agents = n_agents
        self.horizon = horizon
        self.message_edges: Tuple[Edge, ...] = tuple(sorted(message_edges))
        self.null_edges: Tuple[Edge, ...] = tuple(sorted(null_edges))
        self.size = n_agents * (horizon + 1)

        successors: List[List[int]] = [[] for _ in range(self.size)]
        predecessors: List[List[int]] = [[] for _ in range(self.size)]
        for source, target in self.message_edges + self.null_edges:
            if target.time <= source.time:
                raise CausalityError(f"edge {source} -> {target} does not move forward in time")
            s, d = self.index(source), self.index(target)
            successors[s].append(d)
            predecessors[d].append(s)
        for v in range(self.size - n_agents):
            successors[v].append(v + n_agents)
            predecessors[v + n_agents].append(v)

        # Every edge increases time, so index order is a topological order
        forward = [0] * self.size
        for v in range(self.size - 1, -1, -1):
            mask = 1 << v
            for w in successors[v]:
                mask |= forward[w]
            forward[v] = mask
        backward = [0] * self.size
        for v in range(self.size):
            mask = 1 << v
            for u in predecessors[v]:
                mask |= backward[u]
            backward[v] = mask
        self.forward = forward
        self.backward = backward

    @classmethod
    def from_edges(cls, n_agents: int, horizon: int, message_edges: Iterable[Edge],
                   null_edges: Iterable[Edge] = ()) -> "CausalGraph":
        """Graph over a locally known set of edges"""
        return cls(n_agents, horizon, message_edges, null_edges)

    # ==================== INDEXING ====================

    def index(self, node: NodeRef) -> int:
        agent, time = node
        if not 0 <= agent < self.n_agents:
            raise HorizonExceeded(f"node {node} names an agent outside 0..{self.n_agents - 1}")
        if not 0 <= time <= self.horizon:
            raise HorizonExceeded(f"node {node} lies outside the horizon 0..{self.horizon}")
        return time * self.n_agents + agent

    def node(self, index: int) -> NodeRef:
        return NodeRef(index % self.n_agents, index // self.n_agents)

    def nodes_of(self, mask: int) -> Iterator[NodeRef]:
        while mask:
            low = mask & -mask
            yield self.node(low.bit_length() - 1)
            mask ^= low

    def bit(self, node: NodeRef) -> int:
        return 1 << self.index(node)

    def reach(self, node: NodeRef) -> int:
        return self.forward[self.index(node)]

    # ==================== VIEWS ====================

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for t in range(self.horizon + 1):
            for i in range(self.n_agents):
                graph.add_node(NodeRef(i, t))
                if t < self.horizon:
                    graph.add_edge(NodeRef(i, t), NodeRef(i, t + 1), kind="local")
        for source, target in self.message_edges:
            graph.add_edge(source, target, kind="message")
        for source, target in self.null_edges:
            graph.add_edge(source, target, kind="null")
        return graph


def build_causal_graph(run: Run) -> CausalGraph:
    """Node graph whose reachability is the syncausality relation of the run"""
    net, horizon = run.network, run.horizon
    message_edges = [
        (NodeRef(m.sender, m.send_time), NodeRef(m.receiver, m.receive_time))
        for m in run.messages if m.receive_time is not None
    ]
    sent = {m.key for m in run.messages}
    null_edges = [
        (NodeRef(i, t), NodeRef(j, t + bound))
        for (i, j), bound in net.channels.items()
        for t in range(horizon - bound + 1)
        if (i, j, t) not in sent
    ]
    return CausalGraph(net.n_agents, horizon, message_edges, null_edges)


_bundle_graphs: "weakref.WeakKeyDictionary[SystemBundle, dict]" = weakref.WeakKeyDictionary()


def causal_graph_of(bundle: SystemBundle, index: int) -> CausalGraph:
    """Cached causal graph for one run of a bundle"""
    cache = _bundle_graphs.setdefault(bundle, {})
    graph = cache.get(index)
    if graph is None:
        graph = cache[index] = build_causal_graph(bundle.runs[index])
    return graph


def syncausal(g: CausalGraph, source: NodeRef, target: NodeRef) -> bool:
    """source ⤳ target"""
    return bool(g.forward[g.index(source)] >> g.index(target) & 1)


def bound_guarantee(net: Network, source: NodeRef, target: NodeRef) -> bool:
    """source ⇢ target iff t + δ(i, j) ≤ t'; never true for unreachable pairs"""
    d = net.distances[net.check_agent(source.agent)][net.check_agent(target.agent)]
    if d is UNREACHABLE:
        return False
    return source.time + d <= target.time


def causal_past(g: CausalGraph, node: NodeRef) -> FrozenSet[NodeRef]:
    """{θ : θ ⤳ node}"""
    return frozenset(g.nodes_of(g.backward[g.index(node)]))


def causal_future(g: CausalGraph, node: NodeRef) -> FrozenSet[NodeRef]:
    """{θ : node ⤳ θ}"""
    return frozenset(g.nodes_of(g.forward[g.index(node)]))
