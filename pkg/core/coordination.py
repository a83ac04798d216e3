"""
Ordered Response Coordination - core/coordination.py
Response orderings, their SCC condensation and required chains, the
full-information ordered response protocol, and OJR/GOR conformance checks
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Set, Tuple

import networkx as nx

from core.causality import CausalGraph, NodeRef, causal_graph_of
from core.errors import (ConnectivityError, IntervalError, OrderingError, TriggerNotInitial, UnknownResponse,
                         ValidationError)
from core.simulator import OWN_STATE, AgentProtocol, ContextParams, LocalState, Run, StepResult, SystemBundle
from core.structures import find_centibroom, find_centipede
from utils.analysis_logger import log_event

logger = logging.getLogger(__name__)

Chain = Tuple[str, ...]  # (trigger, scc_1, ..., scc_k)


# ==================== ORDERINGS ====================

@dataclass(frozen=True)
class Response:
    """α = ⟨a, i⟩, optionally tagged with the cluster it belongs to"""
    action: str
    agent: int
    cluster: Optional[str] = None


@dataclass(frozen=True, eq=False)
class ResponseOrdering:
    """Directed graph over triggers T and responses A; the preorder is its reachability"""

    triggers: FrozenSet[str]
    responses: Mapping[str, Response]
    edges: FrozenSet[Tuple[str, str]]

    def __post_init__(self):
        object.__setattr__(self, "triggers", frozenset(self.triggers))
        object.__setattr__(self, "responses", dict(self.responses))
        object.__setattr__(self, "edges", frozenset(tuple(e) for e in self.edges))
        overlap = self.triggers & set(self.responses)
        if overlap:
            raise OrderingError(f"ids used as both trigger and response: {sorted(overlap)}")
        for action, response in self.responses.items():
            if response.action != action:
                raise OrderingError(f"response keyed {action!r} carries action {response.action!r}")
        nodes = self.nodes
        for source, target in self.edges:
            for end in (source, target):
                if end not in nodes:
                    raise OrderingError(f"edge ({source}, {target}) names unknown node {end!r}")

    @property
    def nodes(self) -> FrozenSet[str]:
        return self.triggers | frozenset(self.responses)

    def graph(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        for trigger in sorted(self.triggers):
            graph.add_node(trigger, kind="trigger")
        for action, response in sorted(self.responses.items()):
            graph.add_node(action, kind="response", agent=response.agent)
        graph.add_edges_from(sorted(self.edges))
        return graph

    def check_initial(self):
        for source, target in sorted(self.edges):
            if target in self.triggers and source != target:
                raise TriggerNotInitial(f"edge ({source}, {target}) points into trigger {target!r}")

    def precedes(self, first: str, second: str) -> bool:
        """first ⪯ second"""
        return first == second or nx.has_path(self._graph, first, second)

    @property
    def _graph(self) -> nx.DiGraph:
        cached = self.__dict__.get("_graph_cache")
        if cached is None:
            cached = self.graph()
            object.__setattr__(self, "_graph_cache", cached)
        return cached


@dataclass(frozen=True)
class OJRSpec:
    """OJR⟨e_s, A^1..A^k⟩ over disjoint response clusters"""

    trigger: str
    clusters: Tuple[Tuple[Response, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "clusters", tuple(tuple(c) for c in self.clusters))
        if not self.clusters:
            raise OrderingError("an OJR instance needs k >= 1 clusters")
        seen: Set[str] = set()
        for h, cluster in enumerate(self.clusters, start=1):
            if not cluster:
                raise OrderingError(f"OJR cluster {h} is empty")
            for response in cluster:
                if response.action in seen:
                    raise OrderingError(f"response {response.action!r} appears in two OJR clusters")
                seen.add(response.action)

    @property
    def agent_sets(self) -> Tuple[FrozenSet[int], ...]:
        """I^1..I^k"""
        return tuple(frozenset(r.agent for r in cluster) for cluster in self.clusters)

    def cluster_name(self, h: int) -> str:
        tags = {r.cluster for r in self.clusters[h - 1]}
        return tags.pop() if len(tags) == 1 and None not in tags else f"A{h}"

    def to_ordering(self) -> ResponseOrdering:
        """Clusters as cycles, e_s before cluster 1, every member of A^h before every member of A^(h+1)"""
        responses: Dict[str, Response] = {}
        edges: Set[Tuple[str, str]] = set()
        for h, cluster in enumerate(self.clusters, start=1):
            name = self.cluster_name(h)
            members = sorted(cluster, key=lambda r: r.action)
            for response in members:
                responses[response.action] = Response(response.action, response.agent, name)
            if len(members) > 1:
                for first, second in zip(members, members[1:] + members[:1]):
                    edges.add((first.action, second.action))
        for response in self.clusters[0]:
            edges.add((self.trigger, response.action))
        for earlier, later in zip(self.clusters, self.clusters[1:]):
            edges.update((a.action, b.action) for a in earlier for b in later)
        return ResponseOrdering(frozenset({self.trigger}), responses, frozenset(edges))


# ==================== DECOMPOSITION ====================

@dataclass(frozen=True, eq=False)
class CRO:
    """Condensation DAG with triggers as singleton initial nodes and agent-set labels"""

    graph: nx.DiGraph
    members: Dict[str, FrozenSet[str]]
    labels: Dict[str, FrozenSet[int]]
    triggers: FrozenSet[str]
    scc_of: Dict[str, str]

    @property
    def clusters(self) -> List[str]:
        return sorted(name for name in self.members if name not in self.triggers)

    def edges(self) -> Set[Tuple[str, str]]:
        return set(self.graph.edges)

    def reduction(self) -> nx.DiGraph:
        """Covering edges of ⪯'"""
        reduced = nx.transitive_reduction(self.graph)
        reduced.add_nodes_from(self.graph.nodes(data=True))
        return reduced


def _scc_name(ro: ResponseOrdering, members: FrozenSet[str]) -> str:
    if members <= ro.triggers:
        return next(iter(members))
    tags = {ro.responses[m].cluster for m in members}
    if len(tags) == 1 and None not in tags:
        return tags.pop()
    return "+".join(sorted(members))


def scc_decompose(ro: ResponseOrdering) -> CRO:
    """Condense the ordering into its DAG of simultaneity clusters"""
    ro.check_initial()
    full = ro.graph()
    condensed = nx.condensation(full)

    names: Dict[int, str] = {}
    taken: Set[str] = set()
    for index in sorted(condensed.nodes, key=lambda n: sorted(condensed.nodes[n]["members"])):
        members = frozenset(condensed.nodes[index]["members"])
        name = _scc_name(ro, members)
        if name in taken:
            name = "+".join(sorted(members))
        taken.add(name)
        names[index] = name

    graph = nx.DiGraph()
    members_of: Dict[str, FrozenSet[str]] = {}
    labels: Dict[str, FrozenSet[int]] = {}
    scc_of: Dict[str, str] = {}
    for index, name in names.items():
        members = frozenset(condensed.nodes[index]["members"])
        members_of[name] = members
        for member in members:
            scc_of[member] = name
        is_trigger = members <= ro.triggers
        labels[name] = frozenset() if is_trigger else frozenset(ro.responses[m].agent for m in members)
        graph.add_node(name, kind="trigger" if is_trigger else "cluster")
    graph.add_edges_from((names[u], names[v]) for u, v in condensed.edges)

    return CRO(graph, members_of, labels, ro.triggers, scc_of)


def trigger_base(ro: ResponseOrdering, action: str) -> FrozenSet[str]:
    """base_α = {e ∈ T : e ⪯ α}"""
    if action not in ro.responses:
        raise UnknownResponse(f"{action!r} is not a response of this ordering")
    return frozenset(nx.ancestors(ro._graph, action)) & ro.triggers


def required_chains(cro: CRO, action: str) -> Tuple[Chain, ...]:
    """Every covering-edge path from a base trigger to scc_α"""
    target = cro.scc_of.get(action)
    if target is None or target in cro.triggers:
        raise UnknownResponse(f"{action!r} is not a response of this decomposition")
    reduced = cro.reduction()
    chains: Set[Chain] = set()
    for trigger in sorted(cro.triggers & nx.ancestors(reduced, target)):
        for path in nx.all_simple_paths(reduced, trigger, target):
            chains.add(tuple(path))
    return tuple(sorted(chains))


def completion_bound(ro: ResponseOrdering, ctx: ContextParams) -> int:
    """Horizon by which every enabled response is performed and still evaluable"""
    net = ctx.network
    if not net.is_strongly_connected:
        raise ConnectivityError("ordered response protocols need a strongly connected network")
    latest = max((ctx.slot(e).time for e in ro.triggers), default=0)
    return latest + net.max_radius + net.max_bound


def check_completion_horizon(ro: ResponseOrdering, ctx: ContextParams):
    """Reject a horizon below completion_bound, located like a scenario issue"""
    bound = completion_bound(ro, ctx)
    if ctx.horizon < bound:
        raise ValidationError([("context.horizon", f"ordered response scenarios need a horizon of at least {bound}")])


# ==================== PROTOCOLS ====================

@dataclass(frozen=True)
class _Plan:
    action: str
    base: FrozenSet[str]
    chains: Tuple[Tuple[str, Tuple[FrozenSet[int], ...]], ...]


@dataclass(frozen=True)
class KnownPast:
    """What one local state knows: the states it has seen and the edges between them"""
    states: Dict[Tuple[int, int], LocalState]
    inputs: FrozenSet[Tuple[int, int, str]]

    def graph(self, n_agents: int, now: int) -> CausalGraph:
        """Message edges only

        The knowledge protocols send on every channel every round below the
        horizon, so no channel is ever silent and no null-message edge exists.
        """
        edges = set()
        for (agent, time), state in self.states.items():
            for receipt in state.received:
                edges.add((NodeRef(receipt.sender, receipt.send_time), NodeRef(agent, time)))
        return CausalGraph.from_edges(n_agents, now, edges)

    def knows_input(self, event_id: str) -> bool:
        return any(label == event_id for _, _, label in self.inputs)


class _KnowledgeProtocol(AgentProtocol):
    """Full-information broadcast plus decisions over the reconstructed causal past"""

    def __init__(self, ro: ResponseOrdering):
        self.ro = ro
        self.action_ids = frozenset(ro.responses)
        self._past: Dict[str, KnownPast] = {}
        self._decisions: Dict[str, Tuple[str, ...]] = {}

    def reset(self):
        """Decisions depend on the context, so memo tables live for one system"""
        self._past.clear()
        self._decisions.clear()

    def validate(self, ctx: ContextParams):
        if not ctx.network.is_strongly_connected:
            raise ConnectivityError(f"{self.protocol_id} needs a strongly connected network")
        slots = set(ctx.slot_ids)
        missing = sorted(self.ro.triggers - slots)
        if missing:
            raise OrderingError(f"triggers without an input slot: {missing}")
        for response in self.ro.responses.values():
            ctx.network.check_agent(response.agent)

    def known_past(self, state: LocalState) -> KnownPast:
        """Union of the state's own history and every state carried to it"""
        cached = self._past.get(state.digest)
        if cached is not None:
            return cached
        states = {(state.agent, state.time): state}
        inputs = {(state.agent, state.time, e) for e in state.inputs}
        parts = [state.previous] if state.previous is not None else []
        parts += [r.payload for r in state.received if isinstance(r.payload, LocalState)]
        for part in parts:
            known = self.known_past(part)
            states.update(known.states)
            inputs.update(known.inputs)
        past = KnownPast(states, frozenset(inputs))
        self._past[state.digest] = past
        return past

    def step(self, agent, view, memory, ctx):
        sends = tuple((j, OWN_STATE) for j in ctx.network.out_neighbors(agent))
        decided = self._decisions.get(view.digest)
        if decided is None:
            decided = self._decide(agent, view, ctx)
            self._decisions[view.digest] = decided
        return StepResult(sends=sends, responses=decided)

    def _decide(self, agent: int, view: LocalState, ctx: ContextParams) -> Tuple[str, ...]:
        raise NotImplementedError


class GORProtocol(_KnowledgeProtocol):
    """Performs α at the first time all of its required centibrooms are visible

    A chain (e, scc_1..scc_k) needs e's occurrence at ⟨i_0, t_0⟩ in the known
    past and a centibroom for ⟨i_0, I(scc_1)..I(scc_k)⟩ ending now.
    """

    protocol_id = "gor"

    def __init__(self, ro: ResponseOrdering):
        super().__init__(ro)
        self.cro = scc_decompose(ro)
        self.plans: Dict[int, List[_Plan]] = {}
        for action, response in sorted(ro.responses.items()):
            chains = tuple(
                (chain[0], tuple(self.cro.labels[name] for name in chain[1:]))
                for chain in required_chains(self.cro, action)
            )
            plan = _Plan(action, trigger_base(ro, action), chains)
            self.plans.setdefault(response.agent, []).append(plan)

    def validate(self, ctx: ContextParams):
        super().validate(ctx)
        check_completion_horizon(self.ro, ctx)

    def _decide(self, agent, view, ctx):
        pending = [p for p in self.plans.get(agent, ()) if p.base and p.action not in view.performed]
        if not pending:
            return ()
        known = self.known_past(view)
        if not any(known.knows_input(e) for p in pending for e in p.base):
            return ()
        g = known.graph(ctx.network.n_agents, view.time)
        ready = []
        for plan in pending:
            if all(self._chain_visible(g, known, ctx, trigger, groups, view.time)
                   for trigger, groups in plan.chains) and all(known.knows_input(e) for e in plan.base):
                ready.append(plan.action)
        return tuple(ready)

    @staticmethod
    def _chain_visible(g: CausalGraph, known: KnownPast, ctx: ContextParams, trigger: str,
                       groups: Tuple[FrozenSet[int], ...], now: int) -> bool:
        slot = ctx.slot(trigger)
        if (slot.agent, slot.time, trigger) not in known.inputs:
            return False
        return find_centibroom(g, ctx.network, slot.agent, groups, slot.time, now) is not None


class NaiveResponseProtocol(_KnowledgeProtocol):
    """Responds as soon as any base trigger is known; a negative control"""

    protocol_id = "naive-response"

    def _decide(self, agent, view, ctx):
        mine = [a for a, r in sorted(self.ro.responses.items())
                if r.agent == agent and a not in view.performed]
        if not mine:
            return ()
        known = self.known_past(view)
        return tuple(a for a in mine if any(known.knows_input(e) for e in trigger_base(self.ro, a)))


def gor_protocol(ro: ResponseOrdering) -> AgentProtocol:
    return GORProtocol(ro)


def naive_response_protocol(ro: ResponseOrdering) -> AgentProtocol:
    return NaiveResponseProtocol(ro)


# ==================== CHECKS ====================

@dataclass(frozen=True)
class Violation:
    clause: str
    run: int
    detail: str

    def __str__(self) -> str:
        return f"[{self.clause}] run {self.run}: {self.detail}"


@dataclass
class CheckReport:
    name: str
    runs_checked: int = 0
    checks: int = 0
    violations: List[Violation] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, clause: str, run: int, detail: str):
        self.violations.append(Violation(clause, run, detail))

    def summary(self) -> str:
        verdict = "✅ pass" if self.passed else f"❌ {len(self.violations)} violation(s)"
        return f"{self.name}: {verdict} over {self.runs_checked} runs ({self.checks} checks)"


def _response_times(run: Run) -> Dict[str, List[Tuple[int, int]]]:
    times: Dict[str, List[Tuple[int, int]]] = {}
    for event in run.response_events():
        times.setdefault(event.label, []).append((event.agent, event.time))
    return times


def check_gor(bundle: SystemBundle, ro: ResponseOrdering) -> CheckReport:
    """Triggering (iff over base_α) and Weak Ordering on every run"""
    report = CheckReport("gor")
    bases = {action: trigger_base(ro, action) for action in ro.responses}
    ordered = [(a, b) for a in sorted(ro.responses) for b in sorted(ro.responses)
               if a != b and ro.precedes(a, b)]

    for index, run in enumerate(bundle.runs):
        report.runs_checked += 1
        performed = _response_times(run)
        for action, response in sorted(ro.responses.items()):
            report.checks += 1
            hits = performed.get(action, [])
            base = bases[action]
            base_done = bool(base) and all(run.occurrence_time(e) is not None for e in base)
            if bool(hits) != base_done:
                missing = sorted(e for e in base if run.occurrence_time(e) is None)
                state = "occurred" if hits else "did not occur"
                report.add("Triggering", index,
                           f"{action} {state} while base {sorted(base)} is missing {missing}")
            if len(hits) > 1:
                report.add("Uniqueness", index, f"{action} performed {len(hits)} times")
            for agent, _ in hits:
                if agent != response.agent:
                    report.add("Performer", index, f"{action} performed by agent {agent}, not {response.agent}")
        for first, second in ordered:
            report.checks += 1
            t1, t2 = run.occurrence_time(first), run.occurrence_time(second)
            if t1 is not None and t2 is not None and t1 > t2:
                report.add("Weak Ordering", index, f"{first} ⪯ {second} but {first}@{t1} > {second}@{t2}")

    log_event("gor_checked", {"runs": report.runs_checked, "violations": len(report.violations)})
    return report


def check_ojr(bundle: SystemBundle, spec: OJRSpec) -> CheckReport:
    """Weak Triggering, Simultaneity and Linear Ordering for every h"""
    report = CheckReport("ojr")
    for index, run in enumerate(bundle.runs):
        report.runs_checked += 1
        t0 = run.occurrence_time(spec.trigger)
        cluster_times: List[Optional[int]] = []
        for h, cluster in enumerate(spec.clusters, start=1):
            times = {r.action: run.occurrence_time(r.action) for r in cluster}
            occurred = [t for t in times.values() if t is not None]
            cluster_times.append(min(occurred) if occurred else None)
            if not occurred:
                continue
            report.checks += 3
            earlier = [r.action for c in spec.clusters[:h] for r in c]
            missing = [a for a in earlier if run.occurrence_time(a) is None]
            if t0 is None or missing:
                absent = ([spec.trigger] if t0 is None else []) + missing
                report.add("Triggering", index, f"cluster {h} acted without {absent}")
            for g in range(1, h + 1):
                distinct = {run.occurrence_time(r.action) for r in spec.clusters[g - 1]}
                if len(distinct) > 1:
                    shown = {r.action: run.occurrence_time(r.action) for r in spec.clusters[g - 1]}
                    report.add("Simultaneity", index, f"cluster {g} times differ: {shown}")
            chain = [t0] + cluster_times[:h]
            known = [t for t in chain if t is not None]
            if known != sorted(known):
                report.add("Linear Ordering", index, f"times t_0..t_{h} = {chain} are not ordered")
    # Duplicates from the per-h loop
    report.violations = list(dict.fromkeys(report.violations))
    log_event("ojr_checked", {"runs": report.runs_checked, "violations": len(report.violations)})
    return report


def check_required_structures(bundle: SystemBundle, ro: ResponseOrdering) -> CheckReport:
    """Every performed response has a centibroom for each required chain; singleton chains also a centipede"""
    report = CheckReport("required-structures")
    cro = scc_decompose(ro)
    net = bundle.context.network
    chains = {action: required_chains(cro, action) for action in ro.responses}

    for index, run in enumerate(bundle.runs):
        report.runs_checked += 1
        g = causal_graph_of(bundle, index)
        for action in sorted(ro.responses):
            t_prime = run.occurrence_time(action)
            if t_prime is None:
                continue
            for chain in chains[action]:
                trigger, names = chain[0], chain[1:]
                t0 = run.occurrence_time(trigger)
                if t0 is None:
                    continue
                report.checks += 1
                origin = bundle.context.slot(trigger).agent
                groups = [cro.labels[name] for name in names]
                path = " ⪯' ".join(chain)
                try:
                    witness = find_centibroom(g, net, origin, groups, t0, t_prime)
                except IntervalError:
                    report.add("Centibroom", index, f"{action}@{t_prime} precedes its trigger {trigger}@{t0}")
                    continue
                if witness is None:
                    report.add("Centibroom", index, f"no centibroom for {path} into {t_prime}")
                if all(len(cro.members[name]) == 1 for name in names):
                    report.checks += 1
                    agents = [origin] + [next(iter(cro.labels[name])) for name in names]
                    if find_centipede(g, net, agents, t0, t_prime) is None:
                        report.add("Centipede", index, f"no centipede for {path} into {t_prime}")
    log_event("structures_checked", {"runs": report.runs_checked, "violations": len(report.violations)})
    return report
