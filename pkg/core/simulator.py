"""
Synchronous Run Simulator - core/simulator.py
Executes deterministic agent protocols under a chosen environment behavior and
enumerates or samples environment behaviors into finite run systems
"""

import hashlib
import itertools
import json
import logging
import random
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Any, Dict, FrozenSet, Iterator, List, Mapping, Optional, Sequence, Tuple

from core.errors import ExplosionGuard, InvalidDelay, SimulationError, UnknownAgent, UnknownChannel
from core.network import Network
from utils.analysis_logger import log_event

logger = logging.getLogger(__name__)

DEFAULT_CEILING = 200_000

SendKey = Tuple[int, int, int]  # (sender, receiver, send_time)


# ==================== CONTEXT ====================

@dataclass(frozen=True)
class InputSlot:
    """An external input that the environment may or may not deliver"""
    event_id: str
    agent: int
    time: int


@dataclass(frozen=True, eq=False)
class ContextParams:
    """Bounded context: network, horizon, input slots, enumeration ceiling"""

    network: Network
    horizon: int
    slots: Tuple[InputSlot, ...] = ()
    ceiling: int = DEFAULT_CEILING

    def __post_init__(self):
        object.__setattr__(self, "slots", tuple(self.slots))
        if not isinstance(self.horizon, int) or self.horizon < 0:
            raise SimulationError(f"horizon must be a non-negative integer, got {self.horizon!r}")
        if self.ceiling < 1:
            raise SimulationError(f"ceiling must be at least 1, got {self.ceiling}")
        seen = set()
        for slot in self.slots:
            if slot.event_id in seen:
                raise SimulationError(f"input slot id {slot.event_id!r} is declared twice")
            seen.add(slot.event_id)
            try:
                self.network.check_agent(slot.agent)
            except UnknownAgent as e:
                raise SimulationError(f"input slot {slot.event_id!r}: {e}") from e
            if not 0 <= slot.time <= self.horizon:
                raise SimulationError(
                    f"input slot {slot.event_id!r} at time {slot.time} is outside 0..{self.horizon}"
                )

    @property
    def slot_ids(self) -> Tuple[str, ...]:
        return tuple(slot.event_id for slot in self.slots)

    def slot(self, event_id: str) -> InputSlot:
        for slot in self.slots:
            if slot.event_id == event_id:
                return slot
        raise SimulationError(f"no input slot named {event_id!r}")


# ==================== LOCAL STATE ====================

@dataclass(frozen=True)
class Receipt:
    """A delivered message as the receiver sees it"""
    sender: int
    send_time: int
    payload: Any


def payload_token(payload: Any) -> str:
    """Canonical text for a payload; local states are identified by digest"""
    if isinstance(payload, LocalState):
        return f"state:{payload.digest}"
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), default=str)


@dataclass(frozen=True, eq=False)
class LocalState:
    """r_i(t): one round of observations chained to the previous round

    Covers rounds 0..time inclusive, so inputs and receipts that arrive at
    `time` are part of the state at `time`. Equality is digest equality.
    """

    agent: int
    time: int
    inputs: Tuple[str, ...]
    received: Tuple[Receipt, ...]
    responses: Tuple[str, ...]
    previous: Optional["LocalState"] = field(default=None, repr=False)
    digest: str = field(default="", repr=False)
    performed: FrozenSet[str] = field(default=frozenset(), repr=False)

    @classmethod
    def make(cls, agent: int, time: int, inputs: Sequence[str] = (), received: Sequence[Receipt] = (),
             responses: Sequence[str] = (), previous: Optional["LocalState"] = None) -> "LocalState":
        inputs = tuple(sorted(inputs))
        received = tuple(received)
        responses = tuple(responses)
        canonical = json.dumps([
            agent,
            time,
            previous.digest if previous is not None else None,
            list(inputs),
            [[r.sender, r.send_time, payload_token(r.payload)] for r in received],
            list(responses),
        ], separators=(",", ":"))
        digest = hashlib.blake2b(canonical.encode("utf-8"), digest_size=16).hexdigest()
        performed = (previous.performed if previous is not None else frozenset()) | frozenset(responses)
        return cls(agent, time, inputs, received, responses, previous, digest, performed)

    def with_responses(self, responses: Sequence[str]) -> "LocalState":
        return LocalState.make(self.agent, self.time, self.inputs, self.received, responses, self.previous)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, LocalState) and self.digest == other.digest

    def __hash__(self) -> int:
        return hash(self.digest)

    def history(self) -> Tuple["LocalState", ...]:
        """Round records 0..time, oldest first"""
        chain = []
        node: Optional[LocalState] = self
        while node is not None:
            chain.append(node)
            node = node.previous
        return tuple(reversed(chain))

    def at(self, time: int) -> "LocalState":
        if not 0 <= time <= self.time:
            raise SimulationError(f"agent {self.agent} has no round {time} in a state at time {self.time}")
        node = self
        while node.time > time:
            node = node.previous
        return node

    @cached_property
    def inputs_seen(self) -> FrozenSet[str]:
        seen = set()
        for node in self.history():
            seen.update(node.inputs)
        return frozenset(seen)


# ==================== PROTOCOLS ====================

class _OwnState:
    def __repr__(self) -> str:
        return "OWN_STATE"


# Payload placeholder replaced by the sender's local state at send time
OWN_STATE = _OwnState()


@dataclass(frozen=True)
class StepResult:
    sends: Tuple[Tuple[int, Any], ...] = ()
    responses: Tuple[str, ...] = ()
    memory: Any = None


class AgentProtocol(ABC):
    """A deterministic per-agent step function

    `step` sees the agent's local state for the current round (inputs and
    receipts included, responses not yet) plus the memory it returned last
    round, and decides this round's responses and sends.
    """

    protocol_id = "abstract"
    action_ids: FrozenSet[str] = frozenset()

    def validate(self, ctx: ContextParams):
        """Raise when the protocol cannot run in ctx"""

    def reset(self):
        """Drop memo tables before a new system is generated"""

    def initial_memory(self, agent: int, ctx: ContextParams) -> Any:
        return None

    @abstractmethod
    def step(self, agent: int, view: LocalState, memory: Any, ctx: ContextParams) -> StepResult:
        ...


class SilentProtocol(AgentProtocol):
    """Never sends, never responds"""

    protocol_id = "silent"

    def step(self, agent, view, memory, ctx):
        return StepResult()


class FullInformationProtocol(AgentProtocol):
    """Every round, send the whole local state on every outgoing channel"""

    protocol_id = "full-information"

    def step(self, agent, view, memory, ctx):
        return StepResult(sends=tuple((j, OWN_STATE) for j in ctx.network.out_neighbors(agent)))


def silent_protocol() -> AgentProtocol:
    return SilentProtocol()


def full_information_protocol() -> AgentProtocol:
    return FullInformationProtocol()


# ==================== RUNS ====================

class EventKind(Enum):
    EXT_INPUT = "ext_input"
    RECEIVE = "receive"
    RESPONSE = "response"
    SEND = "send"


@dataclass(frozen=True)
class Event:
    kind: EventKind
    agent: int
    time: int
    label: str = ""
    message: Optional[int] = None


@dataclass(frozen=True, eq=False)
class Message:
    """A message record; receive_time is None while still in flight at the horizon"""

    index: int
    sender: int
    receiver: int
    send_time: int
    receive_time: Optional[int]
    payload: Any

    @property
    def key(self) -> SendKey:
        return (self.sender, self.receiver, self.send_time)

    @property
    def in_flight(self) -> bool:
        return self.receive_time is None


class DelayFallback(Enum):
    """What execute does for a send the environment has no delay for"""
    STRICT = "strict"
    MAX_BOUND = "max_bound"


def _send_order(item: Tuple[SendKey, int]) -> Tuple[int, int, int]:
    (sender, receiver, send_time), _ = item
    return (send_time, sender, receiver)


@dataclass(frozen=True)
class EnvironmentChoice:
    """Input presences plus one delivery delay per send, keyed by (sender, receiver, send time)"""

    present: FrozenSet[str] = frozenset()
    delays: Tuple[Tuple[SendKey, int], ...] = ()
    fallback: DelayFallback = DelayFallback.STRICT

    @classmethod
    def of(cls, present: Sequence[str] = (), delays: Optional[Mapping[SendKey, int]] = None,
           fallback: DelayFallback = DelayFallback.STRICT) -> "EnvironmentChoice":
        items = tuple(sorted((delays or {}).items(), key=_send_order))
        return cls(frozenset(present), items, fallback)

    @cached_property
    def delay_map(self) -> Dict[SendKey, int]:
        return dict(self.delays)

    def sort_key(self, ctx: ContextParams) -> Tuple[Tuple[bool, ...], Tuple[int, ...]]:
        """Total canonical order: presence flags in slot order, then delays in send order"""
        flags = tuple(slot.event_id in self.present for slot in ctx.slots)
        return flags, tuple(d for _, d in sorted(self.delays, key=_send_order))

    def corresponding(self) -> "EnvironmentChoice":
        """Same presences and keyed delays; sends absent here get the channel's bound"""
        return EnvironmentChoice(self.present, self.delays, DelayFallback.MAX_BOUND)

    def encode(self) -> str:
        present = ",".join(sorted(self.present))
        delays = " ".join(f"{s}>{r}@{t}:{d}" for (s, r, t), d in sorted(self.delays, key=_send_order))
        return f"present=[{present}] delays=[{delays}]"


@dataclass(frozen=True, eq=False)
class Run:
    """One execution up to the horizon"""

    context: ContextParams = field(repr=False)
    protocol_id: str
    environment: EnvironmentChoice
    events: Tuple[Event, ...]
    local_states: Tuple[Tuple[LocalState, ...], ...] = field(repr=False)
    messages: Tuple[Message, ...] = field(repr=False)

    @property
    def horizon(self) -> int:
        return self.context.horizon

    @property
    def network(self) -> Network:
        return self.context.network

    def state(self, agent: int, time: int) -> LocalState:
        return self.local_states[agent][time]

    @cached_property
    def occurrences(self) -> Dict[str, Tuple[int, int]]:
        """First (agent, time) of every external input and response label"""
        found: Dict[str, Tuple[int, int]] = {}
        for event in self.events:
            if event.kind in (EventKind.EXT_INPUT, EventKind.RESPONSE) and event.label not in found:
                found[event.label] = (event.agent, event.time)
        return found

    def occurrence_time(self, event_id: str) -> Optional[int]:
        hit = self.occurrences.get(event_id)
        return hit[1] if hit is not None else None

    def response_events(self) -> List[Event]:
        return [e for e in self.events if e.kind is EventKind.RESPONSE]

    def sent_on(self, sender: int, receiver: int, send_time: int) -> Optional[Message]:
        return self._send_index.get((sender, receiver, send_time))

    @cached_property
    def _send_index(self) -> Dict[SendKey, Message]:
        return {m.key: m for m in self.messages}


@dataclass(eq=False)
class SystemBundle:
    """A finite set of runs of one protocol in one context"""

    context: ContextParams
    protocol: AgentProtocol
    runs: Tuple[Run, ...]
    exhaustive: bool

    @property
    def protocol_id(self) -> str:
        return self.protocol.protocol_id

    @property
    def event_ids(self) -> FrozenSet[str]:
        return frozenset(self.context.slot_ids) | frozenset(self.protocol.action_ids)

    def __len__(self) -> int:
        return len(self.runs)

    def __iter__(self) -> Iterator[Run]:
        return iter(self.runs)

    def __getitem__(self, index: int) -> Run:
        return self.runs[index]


# ==================== ROUND MACHINE ====================

@dataclass(frozen=True)
class _Frontier:
    time: int
    states: Tuple[Optional[LocalState], ...]
    memories: Tuple[Any, ...]
    pending: Tuple[Message, ...]
    history: Tuple[Tuple[LocalState, ...], ...]
    events: Tuple[Event, ...]
    messages: Tuple[Message, ...]
    delays: Tuple[Tuple[SendKey, int], ...]


@dataclass(frozen=True)
class _RoundDraft:
    frontier: _Frontier
    states: Tuple[LocalState, ...]
    memories: Tuple[Any, ...]
    events: Tuple[Event, ...]
    pending: Tuple[Message, ...]
    sends: Tuple[Tuple[int, int, Any], ...]


class Simulator:
    """Round-by-round executor over immutable frontiers, so enumeration shares prefixes"""

    def __init__(self, protocol: AgentProtocol, ctx: ContextParams):
        self.protocol = protocol
        self.ctx = ctx
        self.net = ctx.network
        self.horizon = ctx.horizon
        protocol.validate(ctx)
        protocol.reset()
        self._slots_at: Dict[Tuple[int, int], Tuple[str, ...]] = {}
        for slot in ctx.slots:
            key = (slot.agent, slot.time)
            self._slots_at[key] = self._slots_at.get(key, ()) + (slot.event_id,)

    def initial(self) -> _Frontier:
        n = self.net.n_agents
        return _Frontier(
            time=0,
            states=(None,) * n,
            memories=tuple(self.protocol.initial_memory(i, self.ctx) for i in range(n)),
            pending=(),
            history=((),) * n,
            events=(),
            messages=(),
            delays=(),
        )

    def play_round(self, frontier: _Frontier, present: FrozenSet[str]) -> _RoundDraft:
        t = frontier.time
        n = self.net.n_agents
        ext_events, receive_events, response_events = [], [], []
        states, memories, sends = [], [], []

        for agent in range(n):
            inputs = tuple(e for e in self._slots_at.get((agent, t), ()) if e in present)
            arrivals = sorted(
                (m for m in frontier.pending if m.receiver == agent and m.receive_time == t),
                key=lambda m: (m.sender, m.send_time),
            )
            view = LocalState.make(
                agent, t, inputs,
                tuple(Receipt(m.sender, m.send_time, m.payload) for m in arrivals),
                (), frontier.states[agent],
            )
            result = self.protocol.step(agent, view, frontier.memories[agent], self.ctx)
            responses = tuple(dict.fromkeys(result.responses))
            final = view.with_responses(responses) if responses else view

            ext_events.extend(Event(EventKind.EXT_INPUT, agent, t, e) for e in view.inputs)
            receive_events.extend(Event(EventKind.RECEIVE, agent, t, "", m.index) for m in arrivals)
            response_events.extend(Event(EventKind.RESPONSE, agent, t, a) for a in responses)

            # Sends in the last round could never land inside the horizon
            if t < self.horizon:
                targets = set()
                for target, payload in result.sends:
                    if not self.net.has_channel(agent, target):
                        raise UnknownChannel(
                            f"{self.protocol.protocol_id}: agent {agent} sent on missing channel ({agent}, {target})"
                        )
                    if target in targets:
                        raise SimulationError(
                            f"{self.protocol.protocol_id}: agent {agent} sent twice on ({agent}, {target}) at {t}"
                        )
                    targets.add(target)
                    sends.append((agent, target, final if payload is OWN_STATE else payload))

            states.append(final)
            memories.append(result.memory)

        return _RoundDraft(
            frontier=frontier,
            states=tuple(states),
            memories=tuple(memories),
            events=frontier.events + tuple(ext_events + receive_events + response_events),
            pending=tuple(m for m in frontier.pending if m.receive_time != t),
            sends=tuple(sorted(sends, key=lambda s: (s[0], s[1]))),
        )

    def delay_options(self, sender: int, receiver: int, send_time: int) -> Tuple[int, ...]:
        """Canonical delays: every landing inside the horizon, plus one in-flight option"""
        bound = self.net.bound(sender, receiver)
        options = [d for d in range(1, bound + 1) if send_time + d <= self.horizon]
        if send_time + bound > self.horizon:
            options.append(self.horizon - send_time + 1)
        return tuple(options)

    def canonical_delay(self, sender: int, receiver: int, send_time: int, delay: int) -> int:
        bound = self.net.bound(sender, receiver)
        if not 1 <= delay <= bound:
            raise InvalidDelay(
                f"delay {delay} for message ({sender} -> {receiver}) at {send_time} is outside [1, {bound}]"
            )
        return min(delay, self.horizon - send_time + 1)

    def settle(self, draft: _RoundDraft, delays: Sequence[int]) -> _Frontier:
        t = draft.frontier.time
        base = len(draft.frontier.messages)
        new_messages, send_events, pending, chosen = [], [], list(draft.pending), []
        for k, ((sender, receiver, payload), delay) in enumerate(zip(draft.sends, delays)):
            arrival = t + delay if t + delay <= self.horizon else None
            message = Message(base + k, sender, receiver, t, arrival, payload)
            new_messages.append(message)
            send_events.append(Event(EventKind.SEND, sender, t, "", message.index))
            chosen.append((message.key, delay))
            if arrival is not None:
                pending.append(message)
        return _Frontier(
            time=t + 1,
            states=draft.states,
            memories=draft.memories,
            pending=tuple(pending),
            history=tuple(h + (s,) for h, s in zip(draft.frontier.history, draft.states)),
            events=draft.events + tuple(send_events),
            messages=draft.frontier.messages + tuple(new_messages),
            delays=draft.frontier.delays + tuple(chosen),
        )

    def finish(self, frontier: _Frontier, present: FrozenSet[str]) -> Run:
        return Run(
            context=self.ctx,
            protocol_id=self.protocol.protocol_id,
            environment=EnvironmentChoice.of(present, dict(frontier.delays)),
            events=frontier.events,
            local_states=frontier.history,
            messages=frontier.messages,
        )

    # ==================== DRIVERS ====================

    def execute(self, env: EnvironmentChoice) -> Run:
        unknown = env.present - set(self.ctx.slot_ids)
        if unknown:
            raise SimulationError(f"environment names unknown input slots: {sorted(unknown)}")
        frontier = self.initial()
        while frontier.time <= self.horizon:
            draft = self.play_round(frontier, env.present)
            delays = [self._delay_from(env, sender, receiver, frontier.time)
                      for sender, receiver, _ in draft.sends]
            frontier = self.settle(draft, delays)
        return self.finish(frontier, env.present)

    def _delay_from(self, env: EnvironmentChoice, sender: int, receiver: int, send_time: int) -> int:
        delay = env.delay_map.get((sender, receiver, send_time))
        if delay is None:
            if env.fallback is DelayFallback.MAX_BOUND:
                delay = self.net.bound(sender, receiver)
            else:
                raise InvalidDelay(f"no delay given for message ({sender} -> {receiver}) sent at {send_time}")
        return self.canonical_delay(sender, receiver, send_time, delay)

    def explore(self, present: FrozenSet[str]) -> Iterator[Run]:
        """Every run with these presences, in canonical delay order"""
        yield from self._descend(self.initial(), present)

    def _descend(self, frontier: _Frontier, present: FrozenSet[str]) -> Iterator[Run]:
        if frontier.time > self.horizon:
            yield self.finish(frontier, present)
            return
        draft = self.play_round(frontier, present)
        options = [self.delay_options(s, r, frontier.time) for s, r, _ in draft.sends]
        for choice in itertools.product(*options):
            yield from self._descend(self.settle(draft, choice), present)

    def presence_assignments(self) -> Iterator[FrozenSet[str]]:
        for flags in itertools.product((False, True), repeat=len(self.ctx.slots)):
            yield frozenset(slot.event_id for slot, on in zip(self.ctx.slots, flags) if on)

    def sample(self, rng: random.Random) -> Run:
        present = frozenset(slot.event_id for slot in self.ctx.slots if rng.random() < 0.5)
        frontier = self.initial()
        while frontier.time <= self.horizon:
            draft = self.play_round(frontier, present)
            delays = [rng.choice(self.delay_options(s, r, frontier.time)) for s, r, _ in draft.sends]
            frontier = self.settle(draft, delays)
        return self.finish(frontier, present)


# ==================== OPERATIONS ====================

def execute(protocol: AgentProtocol, ctx: ContextParams, env: EnvironmentChoice) -> Run:
    """The run determined by (protocol, ctx, env)"""
    run = Simulator(protocol, ctx).execute(env)
    log_event("run_executed", {"protocol": protocol.protocol_id, "environment": env.encode()})
    return run


def _all_runs(protocol: AgentProtocol, ctx: ContextParams, ceiling: Optional[int]) -> Iterator[Run]:
    limit = ceiling if ceiling is not None else ctx.ceiling
    simulator = Simulator(protocol, ctx)
    generated = 0
    for present in simulator.presence_assignments():
        for run in simulator.explore(present):
            generated += 1
            if generated > limit:
                raise ExplosionGuard(limit, generated)
            yield run


def enumerate_environments(ctx: ContextParams, protocol: AgentProtocol,
                           ceiling: Optional[int] = None) -> Iterator[EnvironmentChoice]:
    """Every environment choice exactly once; delays only for sends that actually happen"""
    for run in _all_runs(protocol, ctx, ceiling):
        yield run.environment


def build_system(protocol: AgentProtocol, ctx: ContextParams, ceiling: Optional[int] = None) -> SystemBundle:
    """R(P, γ) restricted to the bounded context, runs in canonical environment order"""
    runs = sorted(_all_runs(protocol, ctx, ceiling), key=lambda r: r.environment.sort_key(ctx))
    logger.info(f"✅ Built exhaustive {protocol.protocol_id} bundle with {len(runs)} runs (horizon {ctx.horizon})")
    log_event("bundle_built", {"protocol": protocol.protocol_id, "runs": len(runs), "horizon": ctx.horizon})
    return SystemBundle(ctx, protocol, tuple(runs), exhaustive=True)


def sample_system(protocol: AgentProtocol, ctx: ContextParams, seed: int, count: int) -> SystemBundle:
    """`count` seeded draws; duplicates allowed, never exhaustive"""
    if count < 1:
        raise SimulationError(f"sample count must be at least 1, got {count}")
    rng = random.Random(seed)
    simulator = Simulator(protocol, ctx)
    runs = tuple(simulator.sample(rng) for _ in range(count))
    logger.info(f"🎲 Sampled {count} {protocol.protocol_id} runs with seed {seed}")
    log_event("bundle_sampled", {"protocol": protocol.protocol_id, "runs": count, "seed": seed})
    return SystemBundle(ctx, protocol, runs, exhaustive=False)


def estimate_environment_count(ctx: ContextParams) -> int:
    """Upper bound assuming every channel carries a message every round"""
    simulator = Simulator(SilentProtocol(), ctx)
    total = 2 ** len(ctx.slots)
    for (i, j) in ctx.network.channels:
        for t in range(ctx.horizon):
            total *= len(simulator.delay_options(i, j, t))
    return total


# ==================== INSPECTION ====================

def run_log(run: Run) -> str:
    """Deterministic text log of a run"""
    lines = [
        f"# protocol={run.protocol_id} horizon={run.horizon} agents={run.network.n_agents}",
        f"# {run.environment.encode()}",
    ]
    for event in run.events:
        prefix = f"t={event.time:>3} agent={event.agent} {event.kind.value:<9}"
        if event.kind in (EventKind.SEND, EventKind.RECEIVE):
            message = run.messages[event.message]
            arrival = "in-flight" if message.in_flight else str(message.receive_time)
            lines.append(
                f"{prefix} #{message.index} {message.sender}->{message.receiver} "
                f"sent={message.send_time} arrives={arrival} payload={_short_token(message.payload)}"
            )
        else:
            lines.append(f"{prefix} {event.label}")
    for agent, states in enumerate(run.local_states):
        lines.append(f"# final agent={agent} state={states[-1].digest}")
    return "\n".join(lines) + "\n"


def _short_token(payload: Any) -> str:
    token = payload_token(payload)
    return token[:18] if token.startswith("state:") else token


def check_run_invariants(run: Run) -> List[str]:
    """Delay legality, channel existence, event distinctness, recall, history shape"""
    problems: List[str] = []
    net, horizon = run.network, run.horizon

    for message in run.messages:
        bound = net.bound(message.sender, message.receiver)
        if bound is None:
            problems.append(f"message #{message.index} on missing channel ({message.sender}, {message.receiver})")
            continue
        if message.receive_time is None:
            if message.send_time + bound <= horizon:
                problems.append(f"message #{message.index} stays in flight although its bound lands inside the horizon")
        elif not message.send_time + 1 <= message.receive_time <= message.send_time + bound:
            problems.append(
                f"message #{message.index} sent {message.send_time} received {message.receive_time} breaks bound {bound}"
            )

    if len(set(run.events)) != len(run.events):
        problems.append("duplicate events in the event log")

    received = {e.message for e in run.events if e.kind is EventKind.RECEIVE}
    delivered = {m.index for m in run.messages if m.receive_time is not None}
    if received != delivered:
        problems.append("receive events do not match delivered message records")

    for agent, states in enumerate(run.local_states):
        if len(states) != horizon + 1:
            problems.append(f"agent {agent} has {len(states)} states for horizon {horizon}")
            continue
        for t, state in enumerate(states):
            if state.time != t or state.agent != agent:
                problems.append(f"agent {agent} state at {t} is labelled ({state.agent}, {state.time})")
            if t and not states[t - 1].performed <= state.performed:
                problems.append(f"agent {agent} forgot a response between {t - 1} and {t}")
            if t and state.previous != states[t - 1]:
                problems.append(f"agent {agent} state at {t} does not extend its state at {t - 1}")
    return problems
