"""
Channel Graph - core/network.py
Weighted directed network with per-channel delivery bounds, shortest distances and radii
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import networkx as nx

from core.errors import BoundViolation, DuplicateChannel, NetworkError, NetworkProblems, SelfChannel, UnknownAgent

logger = logging.getLogger(__name__)


class Marker(Enum):
    """Explicit non-numeric results"""
    UNREACHABLE = "unreachable"
    NEVER = "never"

    def __repr__(self) -> str:
        return self.name

    def __str__(self) -> str:
        return self.value


UNREACHABLE = Marker.UNREACHABLE
NEVER = Marker.NEVER

Distance = Union[int, Marker]
Channel = Tuple[int, int]


@dataclass(frozen=True, eq=False)
class Network:
    """Net = (P, C, b) plus derived shortest distances and radii"""

    n_agents: int
    channels: Mapping[Channel, int]
    names: Tuple[str, ...] = ()
    distances: Tuple[Tuple[Distance, ...], ...] = field(init=False, repr=False)
    radii: Tuple[Distance, ...] = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_agents < 1:
            raise NetworkError(f"a network needs at least one agent, got {self.n_agents}")
        if self.names and len(self.names) != self.n_agents:
            raise NetworkError(f"{len(self.names)} names given for {self.n_agents} agents")
        if len(set(self.names)) != len(self.names):
            raise NetworkError("agent names must be unique")

        for (i, j), bound in self.channels.items():
            for agent in (i, j):
                if not isinstance(agent, int) or not 0 <= agent < self.n_agents:
                    raise UnknownAgent(f"channel ({i}, {j}) references unknown agent {agent}")
            if i == j:
                raise SelfChannel(f"self-channel on agent {i} is not allowed")
            if not isinstance(bound, int) or bound < 1:
                raise BoundViolation(f"channel ({i}, {j}) has bound {bound}; bounds must satisfy b_ij >= 1")

        object.__setattr__(self, "channels", dict(sorted(self.channels.items())))
        object.__setattr__(self, "distances", self._all_pairs())
        object.__setattr__(self, "radii", tuple(self._radius_of(j) for j in range(self.n_agents)))

    # ==================== DERIVATION ====================

    def to_networkx(self) -> nx.DiGraph:
        """Channel graph with the bound stored as edge weight"""
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n_agents))
        for (i, j), bound in self.channels.items():
            graph.add_edge(i, j, bound=bound)
        return graph

    def _all_pairs(self) -> Tuple[Tuple[Distance, ...], ...]:
        lengths = nx.floyd_warshall(self.to_networkx(), weight="bound")
        rows = []
        for i in range(self.n_agents):
            row = []
            for j in range(self.n_agents):
                value = lengths[i][j]
                row.append(UNREACHABLE if value == float("inf") else int(value))
            rows.append(tuple(row))
        return tuple(rows)

    def _radius_of(self, j: int) -> Distance:
        row = self.distances[j]
        if any(d is UNREACHABLE for d in row):
            return UNREACHABLE
        return max(row)

    # ==================== QUERIES ====================

    def check_agent(self, agent: int) -> int:
        if not isinstance(agent, int) or isinstance(agent, bool) or not 0 <= agent < self.n_agents:
            raise UnknownAgent(f"agent {agent!r} is not in 0..{self.n_agents - 1}")
        return agent

    def bound(self, i: int, j: int) -> Optional[int]:
        return self.channels.get((i, j))

    def has_channel(self, i: int, j: int) -> bool:
        return (i, j) in self.channels

    def out_neighbors(self, i: int) -> Tuple[int, ...]:
        return tuple(j for (src, j) in self.channels if src == i)

    @property
    def max_bound(self) -> int:
        """Largest channel bound, 0 for a network without channels"""
        return max(self.channels.values(), default=0)

    @property
    def is_strongly_connected(self) -> bool:
        return all(r is not UNREACHABLE for r in self.radii)

    @property
    def max_radius(self) -> Distance:
        if not self.is_strongly_connected:
            return UNREACHABLE
        return max(self.radii)

    def agent_label(self, agent: int) -> str:
        return self.names[agent] if self.names else str(agent)

    def resolve_agent(self, ref: Union[int, str]) -> int:
        """Accept an index or a declared name"""
        if isinstance(ref, bool):
            raise UnknownAgent(f"agent reference {ref!r} is not an index or a name")
        if isinstance(ref, int):
            return self.check_agent(ref)
        if isinstance(ref, str):
            if ref in self.names:
                return self.names.index(ref)
            if ref.isdigit():
                return self.check_agent(int(ref))
        raise UnknownAgent(f"unknown agent reference {ref!r}")

    def describe(self) -> Dict[str, Any]:
        """Inverse of load_network"""
        description: Dict[str, Any] = {
            "agents": self.n_agents,
            "channels": [[i, j, b] for (i, j), b in self.channels.items()],
        }
        if self.names:
            description["names"] = list(self.names)
        return description


def distance(net: Network, i: int, j: int) -> Distance:
    """δ(i, j): weight of the shortest directed path, UNREACHABLE if none"""
    return net.distances[net.check_agent(i)][net.check_agent(j)]


def radius(net: Network, j: int) -> Distance:
    """Rad(j) = max over h of δ(j, h)"""
    return net.radii[net.check_agent(j)]


def load_network(description: Mapping[str, Any]) -> Network:
    """Build a Network from {"agents", "names"?, "channels"?, "links"?}

    `channels` are directed [from, to, bound] triples; `links` are undirected
    [a, b, bound] triples expanded into two channels with the same bound.
    Agent references may be indices or declared names.
    """
    if "agents" not in description:
        raise NetworkError("network description needs an 'agents' count")
    n_agents = description["agents"]
    if not isinstance(n_agents, int) or isinstance(n_agents, bool) or n_agents < 1:
        raise NetworkError(f"'agents' must be a positive integer, got {n_agents!r}")

    problems: List[NetworkError] = []
    names = tuple(description.get("names") or ())
    if names and len(names) != n_agents:
        problems.append(NetworkError(f"{len(names)} names given for {n_agents} agents"))
    if len(set(names)) != len(names):
        problems.append(NetworkError("agent names must be unique"))

    def resolve(ref: Any) -> Optional[int]:
        if isinstance(ref, str) and ref in names:
            return names.index(ref)
        if isinstance(ref, int) and not isinstance(ref, bool) and 0 <= ref < n_agents:
            return ref
        problems.append(UnknownAgent(f"unknown agent reference {ref!r}"))
        return None

    channels: Dict[Channel, int] = {}

    def add(i: int, j: int, bound: Any):
        if i == j:
            problems.append(SelfChannel(f"self-channel on agent {i} is not allowed"))
        elif (i, j) in channels:
            problems.append(DuplicateChannel(f"channel ({i}, {j}) is listed twice"))
        elif not isinstance(bound, int) or isinstance(bound, bool) or bound < 1:
            problems.append(BoundViolation(f"channel ({i}, {j}) has bound {bound!r}; bounds must satisfy b_ij >= 1"))
        else:
            channels[(i, j)] = bound

    for directed, section in ((True, "channels"), (False, "links")):
        for entry in _triples(description.get(section, []), section, problems):
            a, b = resolve(entry[0]), resolve(entry[1])
            if a is None or b is None:
                continue
            found = len(problems)
            add(a, b, entry[2])
            # A bad link is reported once, not once per direction
            if not directed and len(problems) == found:
                add(b, a, entry[2])

    if len(problems) == 1:
        raise problems[0]
    if problems:
        raise NetworkProblems(problems)

    net = Network(n_agents=n_agents, channels=channels, names=names)
    logger.debug(f"Loaded network with {n_agents} agents and {len(channels)} channels")
    return net


def _triples(entries: Iterable[Any], section: str, problems: List[NetworkError]) -> List[Sequence[Any]]:
    triples = []
    for position, entry in enumerate(entries):
        if not isinstance(entry, (list, tuple)) or len(entry) != 3:
            problems.append(NetworkError(f"{section}[{position}] must be a [from, to, bound] triple"))
            continue
        triples.append(entry)
    return triples
