from typing import Set, Tuple

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from core.epistemics import (And, C, K, ModelChecker, Not, Occ, checker_for, evaluate, nested_ck, nested_knowledge,
                             parse_formula, satisfying_points)
from core.errors import EmptyGroup, FormulaSyntaxError, HorizonExceeded, NonExhaustiveBundle, UnknownEvent
from core.simulator import ContextParams, build_system, full_information_protocol, sample_system
from tests.conftest import pair_network

ALICE, BOB = 0, 1
GO = Occ("go")

Points = Set[Tuple[int, int]]


# ==================== PARSER ====================

def test_negation_and_knowledge_bind_tighter_than_conjunction():
    assert parse_formula("K[0] occ(e) & occ(f)") == And(K(0, Occ("e")), Occ("f"))
    assert parse_formula("!occ(e) & occ(f)") == And(Not(Occ("e")), Occ("f"))
    assert parse_formula("!(occ(e) & occ(f))") == Not(And(Occ("e"), Occ("f")))


def test_agent_names_and_groups():
    names = ("alice", "bob")
    assert parse_formula("K[alice] K[bob] occ(go)", names) == K(0, K(1, GO))
    assert parse_formula("C{alice, 1} occ(go)", names) == C(frozenset({0, 1}), GO)


def test_printed_formulas_parse_back():
    formula = C(frozenset({0, 1}), And(K(1, GO), Not(Occ("stop"))))
    assert parse_formula(str(formula)) == formula


@pytest.mark.parametrize("text", [
    "K[0]",
    "occ(e) &",
    "(occ(e)",
    "occ(e) occ(f)",
    "K[zed] occ(e)",
    "C{} occ(e)",
    "occ e",
    ")",
])
def test_malformed_formulas(text):
    with pytest.raises(FormulaSyntaxError) as caught:
        parse_formula(text)
    assert caught.value.text == text


def test_builders_nest_innermost_first():
    assert nested_knowledge([BOB, ALICE], "go") == K(ALICE, K(BOB, GO))
    assert nested_ck([{0}, {0, 1}], "go") == C(frozenset({0, 1}), C(frozenset({0}), GO))
    with pytest.raises(EmptyGroup):
        nested_ck([], "go")
    with pytest.raises(EmptyGroup):
        C(frozenset(), GO)


# ==================== KNOWLEDGE IN THE PAIR SYSTEM ====================

def test_evaluation_horizon_subtracts_the_largest_bound(pair_bundle):
    assert checker_for(pair_bundle).last_time == 3


def test_receiver_learns_when_the_message_lands(pair_bundle):
    firsts = checker_for(pair_bundle).first_true_times(K(BOB, GO))
    for index, run in enumerate(pair_bundle):
        if "go" not in run.environment.present:
            assert firsts[index] == -1
        else:
            assert firsts[index] == run.environment.delay_map[(ALICE, BOB, 0)]


def test_common_knowledge_arrives_with_the_bound(pair_bundle):
    firsts = checker_for(pair_bundle).first_true_times(C({ALICE, BOB}, GO))
    for index, run in enumerate(pair_bundle):
        assert firsts[index] == (2 if "go" in run.environment.present else -1)


def test_second_order_knowledge_by_the_evaluation_horizon(pair_bundle):
    nested = nested_knowledge([BOB, ALICE], "go")
    for index, run in enumerate(pair_bundle.runs[::64]):
        verdict = evaluate(pair_bundle, (index * 64, 3), nested)
        assert verdict == ("go" in run.environment.present)


def test_singleton_common_knowledge_is_knowledge(pair_bundle):
    checker = checker_for(pair_bundle)
    for agent in (ALICE, BOB):
        assert np.array_equal(checker.table(C({agent}, GO)), checker.table(K(agent, GO)))


def test_knowledge_is_veridical(pair_bundle):
    checker = checker_for(pair_bundle)
    truth = checker.table(GO)
    for formula in (K(ALICE, GO), K(BOB, GO), C({ALICE, BOB}, GO), K(ALICE, Not(GO))):
        assert not np.any(checker.table(formula) & ~checker.table(formula.sub))
    assert not np.any(checker.table(K(BOB, GO)) & ~truth)


@pytest.mark.parametrize("phi", [GO, Not(GO), K(BOB, GO), C({ALICE, BOB}, GO)])
def test_ignorance_is_known(pair_bundle, phi):
    checker = checker_for(pair_bundle)
    for agent in (ALICE, BOB):
        ignorant = checker.table(Not(K(agent, phi)))
        assert np.any(ignorant)
        assert not np.any(ignorant & ~checker.table(K(agent, Not(K(agent, phi)))))


def test_common_knowledge_is_a_fixpoint(pair_bundle):
    checker = checker_for(pair_bundle)
    common = C({ALICE, BOB}, GO)
    expected = checker.table(GO) & checker.table(K(ALICE, common)) & checker.table(K(BOB, common))
    assert np.array_equal(checker.table(common), expected)


def test_satisfying_points_agree_with_the_table(pair_bundle):
    points = satisfying_points(pair_bundle, K(ALICE, GO))
    assert all(pair_bundle[p.run].environment.present == frozenset({"go"}) for p in points)
    assert len(points) == 1024 * 4


# ==================== ERRORS ====================

def test_sampled_bundles_need_the_override(pair_ctx):
    sampled = sample_system(full_information_protocol(), pair_ctx, seed=1, count=10)
    with pytest.raises(NonExhaustiveBundle):
        ModelChecker(sampled)
    assert ModelChecker(sampled, allow_sampled=True).table(GO).shape == (4, 10)


def test_unknown_event(pair_bundle):
    with pytest.raises(UnknownEvent):
        checker_for(pair_bundle).table(Occ("nope"))


def test_points_outside_the_evaluation_range(pair_bundle):
    checker = checker_for(pair_bundle)
    with pytest.raises(HorizonExceeded):
        checker.evaluate((0, 4), GO)
    with pytest.raises(HorizonExceeded):
        checker.evaluate((len(pair_bundle), 0), GO)


def test_horizon_shorter_than_the_bound():
    checker = ModelChecker(build_system(full_information_protocol(), ContextParams(pair_network(), 1)))
    assert checker.last_time == -1
    with pytest.raises(HorizonExceeded):
        checker.table(K(ALICE, Occ("x")))


# ==================== AGAINST A DIRECT EXPANSION ====================

def _naive(bundle, formula, last: int) -> Points:
    """Point-set semantics computed straight from local-state equality"""
    runs = bundle.runs
    every = {(r, t) for r in range(len(runs)) for t in range(last + 1)}
    if isinstance(formula, Occ):
        return {(r, t) for r, t in every
                if (when := runs[r].occurrence_time(formula.event)) is not None and when <= t}
    if isinstance(formula, Not):
        return every - _naive(bundle, formula.sub, last)
    if isinstance(formula, And):
        return _naive(bundle, formula.left, last) & _naive(bundle, formula.right, last)
    if isinstance(formula, K):
        return _knows(bundle, formula.agent, _naive(bundle, formula.sub, last), every)
    base = _naive(bundle, formula.sub, last)
    current = base
    while True:
        refined = set(base)
        for agent in formula.group:
            refined &= _knows(bundle, agent, current, every)
        if refined == current:
            return current
        current = refined


def _knows(bundle, agent: int, truth: Points, every: Points) -> Points:
    spoiled = {(t, bundle.runs[r].state(agent, t).digest) for r, t in every - truth}
    return {(r, t) for r, t in every if (t, bundle.runs[r].state(agent, t).digest) not in spoiled}


GROUPS = [frozenset({ALICE}), frozenset({BOB}), frozenset({ALICE, BOB})]

formulas = st.recursive(
    st.just(GO),
    lambda children: st.one_of(
        children.map(Not),
        st.tuples(children, children).map(lambda pair: And(*pair)),
        st.tuples(st.sampled_from([ALICE, BOB]), children).map(lambda pair: K(*pair)),
        st.tuples(st.sampled_from(GROUPS), children).map(lambda pair: C(*pair)),
    ),
    max_leaves=4,
)


@settings(max_examples=25, deadline=None)
@given(formulas)
def test_tables_match_direct_expansion(pair_bundle, formula):
    checker = checker_for(pair_bundle)
    expected = _naive(pair_bundle, formula, checker.last_time)
    assert {(p.run, p.time) for p in checker.satisfying_points(formula)} == expected
