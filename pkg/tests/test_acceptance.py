import pytest

from core.acceptance import SUITES, pass_count_table, run_suites
from utils.scenario_loader import SUITE_REQUIREMENTS

FAST = ["trivial", "r2_star", "r2_star_gor", "r2_star_snapshot", "ring_snapshot", "ring3_snapshot", "judea", "judea_ojr"]
SLOW = ["r1_pair", "r3_line", "r3_line_gor"]


@pytest.mark.parametrize("name", FAST)
def test_reference_scenarios_pass(load, name):
    results = run_suites(load(name))
    for result in results:
        assert result.passed, [str(v) for v in result.violations[:5]]
    assert sum(r.checks for r in results) > 0


@pytest.mark.slow
@pytest.mark.parametrize("name", SLOW)
def test_large_reference_scenarios_pass(load, name):
    for result in run_suites(load(name)):
        assert result.passed, [str(v) for v in result.violations[:5]]


def test_negative_control_fails(load):
    (result,) = run_suites(load("broken_gor"))
    assert not result.passed
    assert {"Triggering", "Weak Ordering"} <= {v.clause for v in result.violations}


def test_named_suites_override_the_scenario_list(load):
    results = run_suites(load("r2_star_gor"), ["ordering-expectations"])
    assert [r.name for r in results] == ["ordering-expectations"]
    assert results[0].checks == 8


def test_pass_count_table(load):
    results = run_suites(load("trivial"))
    table = pass_count_table(results).splitlines()
    assert table[0].split() == ["suite", "checks", "violations", "verdict"]
    assert [line.split()[0] for line in table[1:]] == ["facts", "epistemic-sanity"]
    assert all(line.endswith("✅ pass") for line in table[1:])


def test_registry_covers_every_declared_suite():
    assert set(SUITES) == set(SUITE_REQUIREMENTS)
