"""
Acceptance Suites - core/acceptance.py
Exhaustive property checks over scenario bundles: causal facts, knowledge gain,
snapshot optimality, ordered response conformance and epistemic sanity
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Callable, Dict, FrozenSet, List, Sequence, Tuple

import numpy as np

from core.causality import causal_graph_of
from core.coordination import (Violation, check_gor, check_ojr, check_required_structures, required_chains,
                               scc_decompose, trigger_base)
from core.epistemics import And, C, Formula, K, Occ, checker_for, nested_ck, nested_knowledge
from core.network import NEVER, UNREACHABLE
from core.simulator import SystemBundle, check_run_invariants
from core.snapshot import flooding_initiations, oracle_earliest_broom, record_channels, recording_times
from core.structures import find_centibroom, find_centipede
from utils.analysis_logger import log_event, log_violation

if TYPE_CHECKING:
    from utils.scenario_loader import Scenario

logger = logging.getLogger(__name__)


@dataclass
class SuiteResult:
    name: str
    checks: int = 0
    violations: List[Violation] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, clause: str, run: int, detail: str):
        self.violations.append(Violation(clause, run, detail))
        log_violation(self.name, f"run {run}: {clause}: {detail}")

    def absorb(self, report):
        self.checks += report.checks
        for violation in report.violations:
            self.add(violation.clause, violation.run, violation.detail)


def _trigger(scenario: "Scenario") -> Tuple[str, int, int]:
    event = scenario.trigger
    slot = scenario.context.slot(event)
    return event, slot.agent, slot.time


# ==================== CAUSAL FACTS ====================

def facts_suite(scenario: "Scenario") -> SuiteResult:
    """Strict time increase along ⤳ and bound guarantees realised in every run"""
    result = SuiteResult("facts")
    bundle = scenario.bundle()
    net, horizon = scenario.network, scenario.context.horizon
    n = net.n_agents

    for index, run in enumerate(bundle.runs):
        for problem in check_run_invariants(run):
            result.add("Run", index, problem)
        g = causal_graph_of(bundle, index)
        for t in range(horizon + 1):
            not_later = (1 << ((t + 1) * n)) - 1
            for i in range(n):
                v = t * n + i
                result.checks += 1
                if g.forward[v] & not_later != 1 << v:
                    result.add("Forward Time", index, f"⟨{i},{t}⟩ reaches a node that is not strictly later")
                for j in range(n):
                    d = net.distances[i][j]
                    if d is UNREACHABLE or t + d > horizon:
                        continue
                    result.checks += 1
                    if not g.forward[v] >> ((t + d) * n + j) & 1:
                        result.add("Bound Guarantee", index, f"⟨{i},{t}⟩ ⇢ ⟨{j},{t + d}⟩ without ⤳")
    return result


# ==================== KNOWLEDGE GAIN ====================

def _first_points(bundle: SystemBundle, formula: Formula) -> List[Tuple[int, int]]:
    """Earliest true time per run; structure presence is monotone in t', so later points add nothing"""
    firsts = checker_for(bundle).first_true_times(formula)
    return [(int(r), int(t)) for r, t in enumerate(firsts) if t >= 0]


def knowledge_gain_suite(scenario: "Scenario") -> SuiteResult:
    """K_{i_k}..K_{i_1} occ(e) implies a centipede ⟨i_0, i_1..i_k⟩"""
    result = SuiteResult("knowledge-gain")
    bundle = scenario.bundle()
    net = scenario.network
    event, origin, t0 = _trigger(scenario)

    for depth in range(1, scenario.max_depth + 1):
        for agents in itertools.product(range(net.n_agents), repeat=depth):
            formula = nested_knowledge(agents, event)
            for run, t_prime in _first_points(bundle, formula):
                result.checks += 1
                g = causal_graph_of(bundle, run)
                if find_centipede(g, net, [origin, *agents], t0, t_prime) is None:
                    result.add("Knowledge Gain", run, f"{formula} at {t_prime} without a centipede")
    return result


def _groups(n_agents: int, max_size: int) -> List[FrozenSet[int]]:
    return [frozenset(c) for size in range(1, max_size + 1) for c in itertools.combinations(range(n_agents), size)]


def common_knowledge_gain_suite(scenario: "Scenario") -> SuiteResult:
    """Nested common knowledge implies a centibroom with the same groups"""
    result = SuiteResult("common-knowledge-gain")
    bundle = scenario.bundle()
    net = scenario.network
    event, origin, t0 = _trigger(scenario)
    groups = _groups(net.n_agents, scenario.max_group_size)

    for depth in range(1, scenario.max_ck_depth + 1):
        for sequence in itertools.product(groups, repeat=depth):
            formula = nested_ck(sequence, event)
            for run, t_prime in _first_points(bundle, formula):
                result.checks += 1
                g = causal_graph_of(bundle, run)
                if find_centibroom(g, net, origin, sequence, t0, t_prime) is None:
                    result.add("Common Knowledge Gain", run, f"{formula} at {t_prime} without a centibroom")
    return result


def nested_ck_at_responses_suite(scenario: "Scenario") -> SuiteResult:
    """At each cluster's response time t_h, C_{I^h}..C_{I^1} occ(e_s) holds"""
    result = SuiteResult("nested-ck-at-responses")
    spec = scenario.ojr
    bundle = scenario.bundle()
    checker = checker_for(bundle)
    agent_sets = spec.agent_sets

    for index, run in enumerate(bundle.runs):
        for h, cluster in enumerate(spec.clusters, start=1):
            times = [t for r in cluster if (t := run.occurrence_time(r.action)) is not None]
            if not times:
                continue
            t_h = min(times)
            if t_h > checker.last_time:
                result.notes.append(f"run {index}: cluster {h} at {t_h} is past the evaluation horizon")
                continue
            result.checks += 1
            formula = nested_ck(agent_sets[:h], spec.trigger)
            if not checker.evaluate((index, t_h), formula):
                result.add("Nested Common Knowledge", index, f"{formula} fails at cluster {h} time {t_h}")
    return result


# ==================== SNAPSHOT ====================

def snapshot_optimality_suite(scenario: "Scenario") -> SuiteResult:
    """Recording is simultaneous, no later than any protocol could manage, with complete channel capture"""
    result = SuiteResult("snapshot-optimality")
    bundle = scenario.bundle()
    ctx = scenario.context

    for index, run in enumerate(bundle.runs):
        present = run.environment.present
        times = recording_times(run)
        if not present:
            result.checks += 1
            if any(times.values()):
                result.add("Spurious Recording", index, "an agent recorded without any trigger")
            continue

        firsts = {agent: recorded[0] for agent, recorded in times.items() if recorded}
        result.checks += 1
        if len(firsts) != ctx.network.n_agents or len(set(firsts.values())) != 1:
            result.add("Simultaneity", index, f"first recordings {firsts}")
            continue
        snap_time = next(iter(firsts.values()))

        result.checks += 1
        oracle = oracle_earliest_broom(ctx, run.environment)
        if oracle is NEVER or oracle != snap_time:
            result.add("Optimality", index, f"recorded at {snap_time}, earliest broom at {oracle}")

        if len(present) == 1:
            result.checks += 1
            excess = {a: c for a, c in flooding_initiations(run).items() if c > 1}
            if excess:
                result.add("Flooding", index, f"agents flooded more than once: {excess}")

        if snap_time + ctx.network.max_bound <= ctx.horizon:
            result.checks += 1
            recorded = {(e.sender, e.receiver, e.send_time) for entries in record_channels(run, snap_time).values()
                        for e in entries}
            expected = {m.key for m in run.messages
                        if m.send_time <= snap_time and m.receive_time is not None and m.receive_time > snap_time}
            if recorded != expected:
                result.add("Channel Completeness", index,
                           f"recorded {sorted(recorded)} but records show {sorted(expected)}")
    return result


# ==================== ORDERED RESPONSE ====================

def gor_conformance_suite(scenario: "Scenario") -> SuiteResult:
    result = SuiteResult("gor-conformance")
    bundle = scenario.bundle()
    result.absorb(check_gor(bundle, scenario.ordering))
    if scenario.ojr is not None:
        result.absorb(check_ojr(bundle, scenario.ojr))
    return result


def required_structures_suite(scenario: "Scenario") -> SuiteResult:
    result = SuiteResult("required-structures")
    result.absorb(check_required_structures(scenario.bundle(), scenario.ordering))
    return result


def ordering_expectations_suite(scenario: "Scenario") -> SuiteResult:
    """Declared condensation, clusters, bases, chains and response outcomes"""
    result = SuiteResult("ordering-expectations")
    ro = scenario.ordering
    cro = scc_decompose(ro)
    expect = scenario.expect

    if "condensation_edges" in expect:
        result.checks += 1
        wanted = {tuple(e) for e in expect["condensation_edges"]}
        if cro.edges() != wanted:
            result.add("Condensation", -1, f"edges {sorted(cro.edges())} differ from {sorted(wanted)}")
    for name, agents in sorted(expect.get("clusters", {}).items()):
        result.checks += 1
        wanted = frozenset(scenario.network.resolve_agent(a) for a in agents)
        if cro.labels.get(name) != wanted:
            result.add("Cluster", -1, f"{name} labelled {sorted(cro.labels.get(name, ()))}, expected {sorted(wanted)}")
    for action, triggers in sorted(expect.get("bases", {}).items()):
        result.checks += 1
        if trigger_base(ro, action) != frozenset(triggers):
            result.add("Base", -1, f"base of {action} is {sorted(trigger_base(ro, action))}")
    for action, chains in sorted(expect.get("chains", {}).items()):
        result.checks += 1
        found = set(required_chains(cro, action))
        wanted = {tuple(c) for c in chains}
        if found != wanted:
            result.add("Chains", -1, f"{action}: {sorted(found)} differ from {sorted(wanted)}")

    outcomes = expect.get("outcomes", [])
    if outcomes:
        bundle = scenario.bundle()
        for outcome in outcomes:
            present = frozenset(outcome.get("present", []))
            matching = [(i, run) for i, run in enumerate(bundle.runs) if run.environment.present == present]
            result.checks += 1
            if not matching:
                result.add("Outcome", -1, f"no run has exactly {sorted(present)} present")
                continue
            for index, run in matching:
                for action in outcome.get("performed", []):
                    if run.occurrence_time(action) is None:
                        result.add("Outcome", index, f"{action} never performed with {sorted(present)}")
                for action in outcome.get("absent", []):
                    if run.occurrence_time(action) is not None:
                        result.add("Outcome", index, f"{action} performed with only {sorted(present)}")
    return result


# ==================== EPISTEMIC SANITY ====================

def _everyone_knows(group: FrozenSet[int], formula: Formula) -> Formula:
    members = sorted(group)
    combined: Formula = K(members[0], formula)
    for agent in members[1:]:
        combined = And(combined, K(agent, formula))
    return combined


def _everyone_knows_table(checker, group: FrozenSet[int], truth: np.ndarray) -> np.ndarray:
    known = np.ones_like(truth)
    for agent in sorted(group):
        known &= checker.know(agent, truth)
    return known


def epistemic_sanity_suite(scenario: "Scenario") -> SuiteResult:
    """Veridicality, the C fixpoint, C over a singleton as K, and C as the limit of E^1..E^m"""
    result = SuiteResult("epistemic-sanity")
    bundle = scenario.bundle()
    checker = checker_for(bundle)
    net = scenario.network
    event, _, _ = _trigger(scenario)
    fact = Occ(event)
    base = checker.table(fact)

    for agent in range(net.n_agents):
        result.checks += 1
        if np.any(checker.table(K(agent, fact)) & ~base):
            result.add("Veridicality", -1, f"K[{agent}] {fact} holds where {fact} is false")
        result.checks += 1
        if not np.array_equal(checker.table(C({agent}, fact)), checker.table(K(agent, fact))):
            result.add("Singleton", -1, f"C{{{agent}}} {fact} differs from K[{agent}] {fact}")

    for group in _groups(net.n_agents, net.n_agents)[net.n_agents:]:
        common = C(group, fact)
        table = checker.table(common)
        result.checks += 1
        fixpoint = base.copy()
        for agent in group:
            fixpoint &= checker.table(K(agent, common))
        if not np.array_equal(table, fixpoint):
            result.add("Fixpoint", -1, f"{common} is not φ ∧ E_G {common}")

        result.checks += 1
        if not np.array_equal(checker.table(_everyone_knows(group, fact)) & table, table):
            result.add("Finite Depth", -1, f"{common} holds where E_G {fact} does not")

        result.checks += 1
        level = _everyone_knows_table(checker, group, base)
        conjunction = level.copy()
        for _ in range(base.size + 1):
            level = _everyone_knows_table(checker, group, level)
            refined = conjunction & level
            if np.array_equal(refined, conjunction):
                break
            conjunction = refined
        if not np.array_equal(conjunction, table):
            result.add("Finite Depth", -1, f"{common} differs from the stable conjunction of E^m")
    return result


# ==================== REGISTRY ====================

SUITES: Dict[str, Callable[["Scenario"], SuiteResult]] = {
    "facts": facts_suite,
    "knowledge-gain": knowledge_gain_suite,
    "common-knowledge-gain": common_knowledge_gain_suite,
    "nested-ck-at-responses": nested_ck_at_responses_suite,
    "snapshot-optimality": snapshot_optimality_suite,
    "gor-conformance": gor_conformance_suite,
    "required-structures": required_structures_suite,
    "epistemic-sanity": epistemic_sanity_suite,
    "ordering-expectations": ordering_expectations_suite,
}


def run_suites(scenario: "Scenario", names: Sequence[str] = ()) -> List[SuiteResult]:
    """Run the named suites, or the scenario's declared ones"""
    results = []
    for name in names or scenario.theorems:
        logger.info(f"🧪 Running {name} on {scenario.name}")
        result = SUITES[name](scenario)
        log_event("suite_finished", {"suite": name, "scenario": scenario.name, "checks": result.checks,
                                     "violations": len(result.violations)})
        results.append(result)
    return results


def pass_count_table(results: Sequence[SuiteResult]) -> str:
    width = max([len(r.name) for r in results] + [5])
    lines = [f"{'suite':<{width}}  {'checks':>8}  {'violations':>10}  verdict"]
    for r in results:
        verdict = "✅ pass" if r.passed else "❌ fail"
        lines.append(f"{r.name:<{width}}  {r.checks:>8}  {len(r.violations):>10}  {verdict}")
    return "\n".join(lines) + "\n"
