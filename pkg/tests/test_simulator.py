import itertools

import pytest

from core.coordination import Response, ResponseOrdering, naive_response_protocol
from core.errors import ExplosionGuard, InvalidDelay, SimulationError
from core.network import load_network
from core.simulator import (ContextParams, DelayFallback, EnvironmentChoice, EventKind, InputSlot, LocalState,
                            build_system, check_run_invariants, enumerate_environments, estimate_environment_count,
                            execute, full_information_protocol, run_log, sample_system, silent_protocol)
from core.snapshot import snapshot_protocol
from tests.conftest import line_network, pair_network, star_network


def _full_information_count(ctx: ContextParams) -> int:
    """Every channel carries one message per round below the horizon"""
    total = 2 ** len(ctx.slots)
    horizon = ctx.horizon
    for bound in ctx.network.channels.values():
        for t in range(horizon):
            landing = sum(1 for d in range(1, bound + 1) if t + d <= horizon)
            total *= landing + (1 if t + bound > horizon else 0)
    return total


# ==================== COUNTS ====================

def test_two_agents_horizon_two_without_slots():
    ctx = ContextParams(pair_network(), 2)
    assert len(build_system(full_information_protocol(), ctx)) == 16


def test_one_slot_doubles_the_count():
    ctx = ContextParams(pair_network(), 2, (InputSlot("go", 0, 0),))
    assert len(build_system(full_information_protocol(), ctx)) == 32


def test_pair_bundle_count(pair_bundle, pair_ctx):
    assert len(pair_bundle) == 2048 == _full_information_count(pair_ctx)
    assert estimate_environment_count(pair_ctx) == 2048


def test_unit_bounds_leave_only_presence_choices(star_bundle):
    assert len(star_bundle) == 2


def test_silent_protocol_sends_nothing(silent_pair_bundle):
    assert len(silent_pair_bundle) == 2
    assert all(not run.messages for run in silent_pair_bundle)


@pytest.mark.slow
def test_line_bundle_count(line_ctx):
    bundle = build_system(full_information_protocol(), line_ctx)
    assert len(bundle) == 8192 == _full_information_count(line_ctx)


def test_environments_are_distinct(pair_ctx):
    encoded = [env.encode() for env in enumerate_environments(pair_ctx, full_information_protocol())]
    assert len(encoded) == len(set(encoded)) == 2048


# ==================== ORDER ====================

def test_first_run_is_quiet_and_fast(pair_bundle):
    first = pair_bundle[0]
    assert first.environment.present == frozenset()
    assert all(d == 1 for _, d in first.environment.delays)


def test_runs_follow_canonical_order(pair_bundle, pair_ctx):
    keys = [run.environment.sort_key(pair_ctx) for run in pair_bundle]
    assert keys == sorted(keys)
    assert pair_bundle[len(pair_bundle) // 2].environment.present == frozenset({"go"})


def _every_assignment(ctx: ContextParams):
    """All delay maps over every (channel, round) a message could use, options computed from the bounds"""
    horizon = ctx.horizon
    keys, choices = [], []
    for (sender, receiver), bound in sorted(ctx.network.channels.items()):
        for t in range(horizon):
            options = [d for d in range(1, bound + 1) if t + d <= horizon]
            if t + bound > horizon:
                options.append(horizon - t + 1)
            keys.append((sender, receiver, t))
            choices.append(options)

    def extend(position, chosen):
        if position == len(keys):
            yield dict(chosen)
            return
        for delay in choices[position]:
            chosen[keys[position]] = delay
            yield from extend(position + 1, chosen)
        del chosen[keys[position]]

    yield from extend(0, {})


def _every_presence(ctx: ContextParams):
    ids = [slot.event_id for slot in ctx.slots]
    for size in range(len(ids) + 1):
        yield from itertools.combinations(ids, size)


def _brute_force_environments(protocol, ctx: ContextParams):
    found = set()
    for present in _every_presence(ctx):
        for delays in _every_assignment(ctx):
            found.add(execute(protocol, ctx, EnvironmentChoice.of(present, delays)).environment)
    return found


def _independent_key(env: EnvironmentChoice, ctx: ContextParams):
    flags = tuple(slot.event_id in env.present for slot in ctx.slots)
    ordered = sorted(env.delays, key=lambda item: (item[0][2], item[0][0], item[0][1]))
    return flags, tuple(delay for _, delay in ordered)


def _ring_ctx():
    net = load_network({"agents": 3, "channels": [[0, 1, 2], [1, 2, 2], [2, 0, 1]]})
    return ContextParams(net, 4, (InputSlot("e", 0, 0), InputSlot("f", 1, 1)))


def _respond_to_e():
    return naive_response_protocol(ResponseOrdering(frozenset({"e"}), {"x": Response("x", 1)},
                                                    frozenset({("e", "x")})))


@pytest.mark.parametrize("make_ctx", [
    lambda: ContextParams(pair_network(), 4, (InputSlot("e", 0, 0),)),
    _ring_ctx,
])
@pytest.mark.parametrize("make_protocol", [snapshot_protocol, _respond_to_e])
def test_bundle_matches_brute_force_enumeration(make_ctx, make_protocol):
    ctx = make_ctx()
    expected = _brute_force_environments(make_protocol(), ctx)
    bundle = build_system(make_protocol(), ctx)
    environments = [run.environment for run in bundle]
    assert len(environments) == len(set(environments)) == len(expected)
    assert set(environments) == expected

    keys = [_independent_key(env, ctx) for env in environments]
    assert all(a < b for a, b in zip(keys, keys[1:]))
    assert keys == [env.sort_key(ctx) for env in environments]


# ==================== EXECUTION ====================

def test_replaying_an_environment_reproduces_the_run(pair_bundle, pair_ctx):
    for run in pair_bundle.runs[::97]:
        again = execute(full_information_protocol(), pair_ctx, run.environment)
        assert run_log(again) == run_log(run)
        for agent in range(2):
            assert again.state(agent, pair_ctx.horizon) == run.state(agent, pair_ctx.horizon)


def test_delay_outside_bound_is_rejected(pair_ctx):
    env = EnvironmentChoice.of(delays={(0, 1, 0): 3}, fallback=DelayFallback.MAX_BOUND)
    with pytest.raises(InvalidDelay):
        execute(full_information_protocol(), pair_ctx, env)


def test_missing_delay_is_rejected_without_fallback(pair_ctx):
    with pytest.raises(InvalidDelay):
        execute(full_information_protocol(), pair_ctx, EnvironmentChoice.of())


def test_max_bound_fallback_fills_every_send(pair_ctx):
    run = execute(full_information_protocol(), pair_ctx, EnvironmentChoice.of(fallback=DelayFallback.MAX_BOUND))
    for message in run.messages:
        if message.send_time + 2 <= pair_ctx.horizon:
            assert message.receive_time == message.send_time + 2
        else:
            assert message.in_flight


def test_unknown_slot_in_environment(pair_ctx):
    with pytest.raises(SimulationError):
        execute(silent_protocol(), pair_ctx, EnvironmentChoice.of(present=["nope"]))


def test_no_sends_in_the_last_round(pair_bundle, pair_ctx):
    assert all(m.send_time < pair_ctx.horizon for run in pair_bundle for m in run.messages)


def test_late_messages_stay_in_flight(pair_bundle, pair_ctx):
    last = pair_bundle[-1]
    late = [m for m in last.messages if m.send_time == pair_ctx.horizon - 1]
    assert late and all(m.in_flight for m in late)
    delivered = {e.message for e in last.events if e.kind is EventKind.RECEIVE}
    assert all(m.index not in delivered for m in late)


def test_every_run_satisfies_the_invariants(pair_bundle):
    for run in pair_bundle:
        assert check_run_invariants(run) == []


def test_states_cover_every_round(pair_bundle, pair_ctx):
    run = pair_bundle[123]
    for agent in range(2):
        for t in range(pair_ctx.horizon + 1):
            state = run.state(agent, t)
            assert (state.agent, state.time) == (agent, t)
            assert len(state.history()) == t + 1
            assert state.at(0) == run.state(agent, 0)


def test_input_appears_in_the_state_at_its_slot(pair_bundle):
    run = pair_bundle[-1]
    assert run.occurrence_time("go") == 0
    assert "go" in run.state(0, 0).inputs
    assert run.state(1, 5).inputs_seen == frozenset()


def test_full_information_receipt_carries_the_senders_input():
    ctx = ContextParams(pair_network(bound=1), 2, (InputSlot("go", 0, 0),))
    bundle = build_system(full_information_protocol(), ctx)
    assert len(bundle) == 2
    run = bundle[1]
    (receipt,) = run.state(1, 1).received
    assert (receipt.sender, receipt.send_time) == (0, 0)
    assert isinstance(receipt.payload, LocalState)
    assert (receipt.payload.agent, receipt.payload.time) == (0, 0)
    assert receipt.payload.inputs == ("go",)
    assert "go" in receipt.payload.inputs_seen
    assert "go" not in run.state(1, 1).inputs_seen
    assert bundle[0].state(1, 1).received[0].payload.inputs == ()


def test_delay_changes_what_the_receiver_sees(pair_ctx):
    fast = execute(full_information_protocol(), pair_ctx,
                   EnvironmentChoice.of(["go"], {(0, 1, 0): 1}, DelayFallback.MAX_BOUND))
    slow = execute(full_information_protocol(), pair_ctx,
                   EnvironmentChoice.of(["go"], {(0, 1, 0): 2}, DelayFallback.MAX_BOUND))
    assert fast.state(1, 1) != slow.state(1, 1)
    assert fast.state(1, 1).received and not slow.state(1, 1).received


# ==================== LIMITS ====================

def test_explosion_guard_reports_ceiling(pair_ctx):
    with pytest.raises(ExplosionGuard) as caught:
        build_system(full_information_protocol(), pair_ctx, ceiling=100)
    assert caught.value.ceiling == 100
    assert caught.value.generated == 101


def test_context_validation():
    with pytest.raises(SimulationError):
        ContextParams(star_network(), -1)
    with pytest.raises(SimulationError):
        ContextParams(star_network(), 2, (InputSlot("e", 0, 3),))
    with pytest.raises(SimulationError):
        ContextParams(star_network(), 2, (InputSlot("e", 0, 0), InputSlot("e", 1, 0)))
    with pytest.raises(SimulationError):
        ContextParams(star_network(), 2, (InputSlot("e", 9, 0),))


# ==================== SAMPLING ====================

def test_sampling_is_seeded(pair_ctx, pair_bundle):
    first = sample_system(full_information_protocol(), pair_ctx, seed=7, count=20)
    second = sample_system(full_information_protocol(), pair_ctx, seed=7, count=20)
    assert not first.exhaustive
    assert [r.environment.encode() for r in first] == [r.environment.encode() for r in second]
    known = {r.environment.encode() for r in pair_bundle}
    assert {r.environment.encode() for r in first} <= known


def test_sample_count_must_be_positive(pair_ctx):
    with pytest.raises(SimulationError):
        sample_system(full_information_protocol(), pair_ctx, seed=0, count=0)


def test_run_log_is_deterministic(line_ctx):
    env = EnvironmentChoice.of(["e"], fallback=DelayFallback.MAX_BOUND)
    log = run_log(execute(full_information_protocol(), line_ctx, env))
    assert log == run_log(execute(full_information_protocol(), line_ctx, env))
    assert log.startswith("# protocol=full-information horizon=6 agents=3")
    assert "ext_input" in log
    assert "in-flight" in log


def test_line_network_fixture_is_connected():
    assert line_network().is_strongly_connected
