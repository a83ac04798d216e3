"""
Optimal Snapshot - core/snapshot.py
Flooding snapshot protocol that records every local state at one common time,
channel-content capture, and the earliest-broom optimality oracle
"""

import logging
import math
from dataclasses import dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

from core.causality import build_causal_graph
from core.errors import ConnectivityError, HorizonExceeded, NonSimultaneous, NoTrigger
from core.network import NEVER, Marker, Network
from core.simulator import (AgentProtocol, ContextParams, EnvironmentChoice, LocalState, Run, StepResult,
                            execute, full_information_protocol)
from core.structures import earliest_formation_time
from utils.analysis_logger import log_event

logger = logging.getLogger(__name__)

RECORD_ACTION = "record_state"
INFINITY = math.inf


# ==================== PROTOCOL ====================

@dataclass(frozen=True)
class SnapMemory:
    """Snap_Time plus the last recording time and flooding count"""
    snap_time: float = INFINITY
    last_recorded: int = -1
    floods: int = 0


def _snap_value(payload: Any) -> Optional[int]:
    if isinstance(payload, Mapping) and "snap" in payload:
        return payload["snap"]
    return None


class SnapshotProtocol(AgentProtocol):
    """Every input slot is an ext_Snap trigger

    Each round the arrived Snap_msg times and a trigger fold into one
    candidate, capped at now + Rad(i). A strict improvement of Snap_Time is
    broadcast on every outgoing channel; reaching Snap_Time records the state
    and resets Snap_Time. Snap_msgs sent at or before the last recording, or
    carrying a time already past, are ignored.
    """

    protocol_id = "snapshot"
    action_ids = frozenset({RECORD_ACTION})

    def validate(self, ctx: ContextParams):
        if not ctx.network.is_strongly_connected:
            raise ConnectivityError("the snapshot protocol needs a strongly connected network (finite radii)")

    def initial_memory(self, agent: int, ctx: ContextParams) -> SnapMemory:
        return SnapMemory()

    def step(self, agent: int, view: LocalState, memory: SnapMemory, ctx: ContextParams) -> StepResult:
        now = view.time
        arrived = [
            value for receipt in view.received
            if (value := _snap_value(receipt.payload)) is not None
            and receipt.send_time > memory.last_recorded and value >= now
        ]
        snap_time, floods, sends = memory.snap_time, memory.floods, ()

        if arrived or view.inputs:
            candidate = min(arrived, default=INFINITY)
            candidate = min(candidate, now + ctx.network.radii[agent])
            if candidate < snap_time:
                snap_time = candidate
                floods += 1
                sends = tuple((j, {"snap": int(snap_time)}) for j in ctx.network.out_neighbors(agent))

        responses, last_recorded = (), memory.last_recorded
        if now == snap_time:
            responses = (RECORD_ACTION,)
            last_recorded = now
            snap_time = INFINITY
        return StepResult(sends, responses, SnapMemory(snap_time, last_recorded, floods))


def snapshot_protocol() -> AgentProtocol:
    return SnapshotProtocol()


def snapshot_horizon_bound(ctx: ContextParams) -> int:
    """Least horizon at which recording and channel capture finish for every trigger"""
    net = ctx.network
    if not net.is_strongly_connected:
        raise ConnectivityError("snapshot horizons need a strongly connected network")
    latest = max((slot.time for slot in ctx.slots), default=0)
    return latest + 2 * net.max_radius + net.max_bound


# ==================== RESULTS ====================

@dataclass(frozen=True)
class InTransit:
    """A message crossing the recording cut"""
    sender: int
    receiver: int
    send_time: int
    receive_time: int
    payload: Any


@dataclass(frozen=True)
class SnapshotResult:
    time: int
    states: Tuple[LocalState, ...]
    channels: Dict[Tuple[int, int], Tuple[InTransit, ...]]
    run: Run

    @property
    def in_transit_count(self) -> int:
        return sum(len(entries) for entries in self.channels.values())


def record_channels(run: Run, snap_time: int) -> Dict[Tuple[int, int], Tuple[InTransit, ...]]:
    """Per channel (j, i): receipts at i during (S, S+b_ji] whose carried send time is ≤ S"""
    net = run.network
    channels: Dict[Tuple[int, int], Tuple[InTransit, ...]] = {}
    for (sender, receiver), bound in net.channels.items():
        if snap_time + bound > run.horizon:
            raise HorizonExceeded(
                f"channel ({sender}, {receiver}) needs time {snap_time + bound} to settle; horizon is {run.horizon}"
            )
        entries = []
        for t in range(snap_time + 1, snap_time + bound + 1):
            for receipt in run.state(receiver, t).received:
                if receipt.sender == sender and receipt.send_time <= snap_time:
                    entries.append(InTransit(sender, receiver, receipt.send_time, t, receipt.payload))
        channels[(sender, receiver)] = tuple(entries)
    return channels


def recording_times(run: Run) -> Dict[int, List[int]]:
    """Every time each agent recorded its state"""
    times: Dict[int, List[int]] = {i: [] for i in range(run.network.n_agents)}
    for event in run.response_events():
        if event.label == RECORD_ACTION:
            times[event.agent].append(event.time)
    return times


def flooding_initiations(run: Run) -> Dict[int, int]:
    """Per agent, the number of rounds in which it broadcast a Snap_msg"""
    rounds: Dict[int, set] = {i: set() for i in range(run.network.n_agents)}
    for message in run.messages:
        if _snap_value(message.payload) is not None:
            rounds[message.sender].add(message.send_time)
    return {agent: len(times) for agent, times in rounds.items()}


# ==================== OPERATIONS ====================

def run_snapshot_scenario(ctx: ContextParams, env: EnvironmentChoice) -> SnapshotResult:
    """One snapshot episode: the first common recording time and the cut at it"""
    if not env.present:
        raise NoTrigger("no ext_Snap input is present in this environment")
    run = execute(snapshot_protocol(), ctx, env)
    times = recording_times(run)

    firsts = {agent: recorded[0] for agent, recorded in times.items() if recorded}
    if len(firsts) != run.network.n_agents or len(set(firsts.values())) != 1:
        raise NonSimultaneous(f"agents recorded at different times: {firsts}")
    snap_time = next(iter(firsts.values()))

    result = SnapshotResult(
        time=snap_time,
        states=tuple(run.state(i, snap_time) for i in range(run.network.n_agents)),
        channels=record_channels(run, snap_time),
        run=run,
    )
    log_event("snapshot_episode", {"time": snap_time, "in_transit": result.in_transit_count,
                                   "environment": env.encode()})
    return result


def oracle_earliest_broom(ctx: ContextParams, env: EnvironmentChoice) -> Union[int, Marker]:
    """Earliest t' at which any protocol could record: the first broom of the full-information run"""
    run = execute(full_information_protocol(), ctx, env.corresponding())
    g = build_causal_graph(run)
    everyone = frozenset(range(ctx.network.n_agents))
    best: Union[int, Marker] = NEVER
    for slot in ctx.slots:
        if slot.event_id not in env.present:
            continue
        formed = earliest_formation_time(g, ctx.network, slot.agent, [everyone], slot.time)
        if formed is not NEVER and (best is NEVER or formed < best):
            best = formed
    return best


def snapshot_report(result: SnapshotResult, net: Network) -> str:
    """Structured text report of a snapshot episode"""
    lines = [f"snapshot time: {result.time}", "states:"]
    for state in result.states:
        inputs = ",".join(sorted(state.inputs_seen)) or "-"
        lines.append(f"  {net.agent_label(state.agent)}: digest={state.digest} inputs_seen=[{inputs}]")
    lines.append("channels:")
    for (sender, receiver), entries in result.channels.items():
        label = f"{net.agent_label(sender)}->{net.agent_label(receiver)}"
        if not entries:
            lines.append(f"  {label}: empty")
            continue
        for entry in entries:
            lines.append(f"  {label}: sent={entry.send_time} received={entry.receive_time}")
    return "\n".join(lines) + "\n"
