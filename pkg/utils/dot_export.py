"""
DOT Export - utils/dot_export.py
Graphviz renderings of run causal graphs, structure witnesses and condensed orderings
"""

import logging
from typing import Optional, Union

from graphviz import Digraph

from core.causality import CausalGraph, NodeRef, build_causal_graph
from core.coordination import CRO
from core.network import Network
from core.simulator import Run
from core.structures import StructureKind, StructureWitness

logger = logging.getLogger(__name__)


def _node_id(node: NodeRef) -> str:
    return f"a{node.agent}_t{node.time}"


def _node_label(net: Network, node: NodeRef) -> str:
    return f"⟨{net.agent_label(node.agent)},{node.time}⟩"


def run_to_dot(run: Run, snapshot_time: Optional[int] = None, graph: Optional[CausalGraph] = None) -> str:
    """One node per ⟨agent, time⟩; send-receive edges solid, null-message edges dashed"""
    net = run.network
    g = graph if graph is not None else build_causal_graph(run)
    dot = Digraph(name="run", comment=f"{run.protocol_id} {run.environment.encode()}")
    dot.attr(rankdir="LR")

    for t in range(run.horizon + 1):
        with dot.subgraph(name=f"time_{t}") as column:
            column.attr(rank="same")
            for i in range(net.n_agents):
                node = NodeRef(i, t)
                attrs = {}
                if snapshot_time is not None and t == snapshot_time:
                    attrs = {"color": "red", "penwidth": "2", "xlabel": "cut"}
                column.node(_node_id(node), _node_label(net, node), **attrs)

    for source, target in g.message_edges:
        dot.edge(_node_id(source), _node_id(target), style="solid")
    for source, target in g.null_edges:
        dot.edge(_node_id(source), _node_id(target), style="dashed", color="gray")
    return dot.source


def witness_to_dot(witness: StructureWitness, net: Network) -> str:
    """Chain edges bold, bound-guarantee legs dashed into ⟨i, t'⟩"""
    dot = Digraph(name=witness.kind.value, comment=witness.describe(net))
    dot.attr(rankdir="LR")
    seen = set()

    def add(node: NodeRef, **attrs):
        if node not in seen:
            seen.add(node)
            dot.node(_node_id(node), _node_label(net, node), **attrs)

    for h, node in enumerate(witness.nodes):
        add(node, shape="doublecircle" if h == 0 else "circle")
    for source, target in zip(witness.nodes, witness.nodes[1:]):
        dot.edge(_node_id(source), _node_id(target), style="bold", label="⤳")
    for source, target in witness.legs():
        add(target, shape="box")
        dot.edge(_node_id(source), _node_id(target), style="dashed", label="⇢")
    if witness.kind is StructureKind.CENTIPEDE:
        add(witness.nodes[-1])
    return dot.source


def cro_to_dot(cro: CRO, net: Optional[Network] = None) -> str:
    """Condensation DAG over its covering edges, labelled with agent sets"""
    dot = Digraph(name="cro")
    dot.attr(rankdir="TB")
    reduced = cro.reduction()
    names = {name: f"n{position}" for position, name in enumerate(sorted(reduced.nodes))}

    for name in sorted(reduced.nodes):
        if name in cro.triggers:
            dot.node(names[name], name, shape="box")
            continue
        agents = sorted(cro.labels[name])
        shown = ",".join(net.agent_label(a) if net else str(a) for a in agents)
        dot.node(names[name], f"{name}\\n{{{shown}}}", shape="ellipse")
    for source, target in sorted(reduced.edges):
        dot.edge(names[source], names[target])
    return dot.source


def export_dot(obj: Union[Run, StructureWitness, CRO], net: Optional[Network] = None,
               snapshot_time: Optional[int] = None) -> str:
    """DOT text for a run, a witness or a condensed ordering"""
    if isinstance(obj, Run):
        return run_to_dot(obj, snapshot_time)
    if isinstance(obj, StructureWitness):
        if net is None:
            raise ValueError("witness export needs the network")
        return witness_to_dot(obj, net)
    if isinstance(obj, CRO):
        return cro_to_dot(obj, net)
    raise TypeError(f"cannot export {type(obj).__name__} to DOT")
