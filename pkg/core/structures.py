"""
Coordination Structures - core/structures.py
Centipede, broom and centibroom search over causal graphs by forward
candidate sets and backward feasibility, with a literal witness validator
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import FrozenSet, List, Optional, Sequence, Tuple, Union

from core.causality import CausalGraph, NodeRef, bound_guarantee, syncausal
from core.errors import HorizonExceeded, IntervalError, StructureQueryError
from core.network import NEVER, UNREACHABLE, Marker, Network

logger = logging.getLogger(__name__)


class StructureKind(Enum):
    CENTIPEDE = "centipede"
    BROOM = "broom"
    CENTIBROOM = "centibroom"


@dataclass(frozen=True)
class StructureWitness:
    """θ_0..θ_k plus the targets whose legs land at ⟨·, t'⟩

    For centipedes `targets` holds the singletons {i_1}..{i_k}; the last one
    is reached by the chain itself (θ_k = ⟨i_k, t'⟩) rather than by a leg.
    """

    kind: StructureKind
    origin: NodeRef
    nodes: Tuple[NodeRef, ...]
    interval: Tuple[int, int]
    targets: Tuple[FrozenSet[int], ...]

    @property
    def k(self) -> int:
        return len(self.nodes) - 1

    def legs(self) -> List[Tuple[NodeRef, NodeRef]]:
        """Bound-guarantee legs θ_h ⇢ ⟨i, t'⟩"""
        t_prime = self.interval[1]
        levels = self.targets[:-1] if self.kind is StructureKind.CENTIPEDE else self.targets
        return [
            (self.nodes[h], NodeRef(i, t_prime))
            for h, group in enumerate(levels, start=1)
            for i in sorted(group)
        ]

    def describe(self, net: Network) -> str:
        chain = " ⤳ ".join(f"⟨{net.agent_label(n.agent)},{n.time}⟩" for n in self.nodes)
        groups = ", ".join("{" + ",".join(net.agent_label(i) for i in sorted(g)) + "}" for g in self.targets)
        return f"{self.kind.value} [{groups}] in {self.interval[0]}..{self.interval[1]}: {chain}"


# ==================== SEARCH CORE ====================

@lru_cache(maxsize=4096)
def _bound_mask(net: Network, n_agents: int, horizon: int, group: FrozenSet[int], t_prime: int) -> int:
    """Nodes θ with θ ⇢ ⟨i, t'⟩ for every i in group"""
    mask = 0
    for agent in range(n_agents):
        reach = [net.distances[agent][i] for i in group]
        if any(d is UNREACHABLE for d in reach):
            continue
        latest = t_prime - max(reach)
        for time in range(0, min(latest, horizon) + 1):
            mask |= 1 << (time * n_agents + agent)
    return mask


def _lowest(mask: int) -> int:
    return (mask & -mask).bit_length() - 1


def _spread(g: CausalGraph, mask: int) -> int:
    reached = 0
    while mask:
        low = mask & -mask
        reached |= g.forward[low.bit_length() - 1]
        mask ^= low
    return reached


def _least_chain(g: CausalGraph, start: int, masks: Sequence[int]) -> Optional[List[int]]:
    """Least (by (time, agent) per level) chain start ⤳ v_1 ⤳ ... ⤳ v_k with v_h in masks[h-1]"""
    candidates = [1 << start]
    for allowed in masks:
        level = _spread(g, candidates[-1]) & allowed
        if not level:
            return None
        candidates.append(level)

    k = len(masks)
    feasible = [0] * (k + 1)
    feasible[k] = candidates[k]
    for h in range(k - 1, 0, -1):
        level, keep = candidates[h], 0
        while level:
            low = level & -level
            if g.forward[low.bit_length() - 1] & feasible[h + 1]:
                keep |= low
            level ^= low
        feasible[h] = keep

    chosen, reach = [], g.forward[start]
    for h in range(1, k + 1):
        v = _lowest(reach & feasible[h])
        chosen.append(v)
        reach = g.forward[v]
    return chosen


def _check_interval(g: CausalGraph, t: int, t_prime: int):
    if t > t_prime:
        raise IntervalError(f"structure interval {t}..{t_prime} is empty (t > t')")
    if t < 0 or t_prime > g.horizon:
        raise HorizonExceeded(f"structure interval {t}..{t_prime} leaves the horizon 0..{g.horizon}")


def _check_groups(net: Network, groups: Sequence[FrozenSet[int]]) -> Tuple[FrozenSet[int], ...]:
    if not groups:
        raise StructureQueryError("structure queries need k >= 1 levels")
    frozen = []
    for h, group in enumerate(groups, start=1):
        members = frozenset(net.check_agent(i) for i in group)
        if not members:
            raise StructureQueryError(f"group {h} of the structure query is empty")
        frozen.append(members)
    return tuple(frozen)


# ==================== OPERATIONS ====================

def find_centibroom(g: CausalGraph, net: Network, origin: int, groups: Sequence[FrozenSet[int]],
                    t: int, t_prime: int) -> Optional[StructureWitness]:
    """A centibroom for ⟨origin, I^1..I^k⟩ in (r, t..t'), or None"""
    _check_interval(g, t, t_prime)
    levels = _check_groups(net, groups)
    start = NodeRef(net.check_agent(origin), t)
    masks = [_bound_mask(net, g.n_agents, g.horizon, group, t_prime) for group in levels]
    chain = _least_chain(g, g.index(start), masks)
    if chain is None:
        return None
    return StructureWitness(
        kind=StructureKind.CENTIBROOM,
        origin=start,
        nodes=(start,) + tuple(g.node(v) for v in chain),
        interval=(t, t_prime),
        targets=levels,
    )


def find_broom(g: CausalGraph, net: Network, origin: int, group: FrozenSet[int],
               t: int, t_prime: int) -> Optional[StructureWitness]:
    """A centibroom with k = 1"""
    witness = find_centibroom(g, net, origin, [group], t, t_prime)
    if witness is None:
        return None
    return StructureWitness(StructureKind.BROOM, witness.origin, witness.nodes, witness.interval, witness.targets)


def find_centipede(g: CausalGraph, net: Network, agents: Sequence[int],
                   t: int, t_prime: int) -> Optional[StructureWitness]:
    """A centipede for ⟨i_0, i_1..i_k⟩: legs θ_h ⇢ ⟨i_h, t'⟩ for h < k and θ_k = ⟨i_k, t'⟩"""
    _check_interval(g, t, t_prime)
    if len(agents) < 2:
        raise StructureQueryError("centipede queries need k >= 1 (at least two agents)")
    members = [net.check_agent(i) for i in agents]
    start = NodeRef(members[0], t)
    end = NodeRef(members[-1], t_prime)
    masks = [_bound_mask(net, g.n_agents, g.horizon, frozenset({i}), t_prime) for i in members[1:-1]]
    masks.append(g.bit(end))
    chain = _least_chain(g, g.index(start), masks)
    if chain is None:
        return None
    return StructureWitness(
        kind=StructureKind.CENTIPEDE,
        origin=start,
        nodes=(start,) + tuple(g.node(v) for v in chain),
        interval=(t, t_prime),
        targets=tuple(frozenset({i}) for i in members[1:]),
    )


def earliest_formation_time(g: CausalGraph, net: Network, origin: int, groups: Sequence[FrozenSet[int]],
                            t: int) -> Union[int, Marker]:
    """Least t' in [t, horizon] with a centibroom, NEVER otherwise"""
    for t_prime in range(t, g.horizon + 1):
        if find_centibroom(g, net, origin, groups, t, t_prime) is not None:
            return t_prime
    return NEVER


def validate_witness(g: CausalGraph, net: Network, witness: StructureWitness) -> List[str]:
    """Check the definition's clauses literally; an empty list means valid"""
    problems = []
    t, t_prime = witness.interval
    nodes = witness.nodes
    if witness.k < 1 or len(witness.targets) != witness.k:
        return [f"witness has {len(nodes)} nodes for {len(witness.targets)} target levels"]
    if nodes[0] != witness.origin or nodes[0].time != t:
        problems.append(f"θ_0 = {nodes[0]} is not the origin node ⟨{witness.origin.agent},{t}⟩")
    for h in range(1, len(nodes)):
        if not syncausal(g, nodes[h - 1], nodes[h]):
            problems.append(f"θ_{h - 1} = {nodes[h - 1]} does not reach θ_{h} = {nodes[h]}")
    for h, node in enumerate(nodes):
        if not t <= node.time <= t_prime:
            problems.append(f"θ_{h} = {node} lies outside {t}..{t_prime}")
    for source, target in witness.legs():
        if not bound_guarantee(net, source, target):
            problems.append(f"missing bound guarantee {source} ⇢ {target}")
    if witness.kind is StructureKind.CENTIPEDE:
        (last,) = witness.targets[-1]
        if nodes[-1] != NodeRef(last, t_prime):
            problems.append(f"θ_k = {nodes[-1]} is not ⟨{last},{t_prime}⟩")
    return problems


# ==================== QUERIES ====================

@dataclass(frozen=True)
class StructureQuery:
    """A scenario-level structure request"""

    kind: StructureKind
    origin: int
    groups: Tuple[FrozenSet[int], ...]
    t: int
    t_prime: int
    run: int = 0

    def __post_init__(self):
        if self.kind is StructureKind.CENTIPEDE:
            crowded = [sorted(group) for group in self.groups if len(group) != 1]
            if crowded:
                raise StructureQueryError(f"centipede queries take one agent per level, got groups {crowded}")
        if self.kind is StructureKind.BROOM and len(self.groups) != 1:
            raise StructureQueryError("broom queries take exactly one group")

    def search(self, g: CausalGraph, net: Network) -> Optional[StructureWitness]:
        if self.kind is StructureKind.CENTIPEDE:
            agents = [self.origin] + [next(iter(group)) for group in self.groups]
            return find_centipede(g, net, agents, self.t, self.t_prime)
        if self.kind is StructureKind.BROOM:
            return find_broom(g, net, self.origin, self.groups[0], self.t, self.t_prime)
        return find_centibroom(g, net, self.origin, self.groups, self.t, self.t_prime)

    def describe(self, net: Network) -> str:
        groups = ", ".join("{" + ",".join(net.agent_label(i) for i in sorted(g)) + "}" for g in self.groups)
        return (f"{self.kind.value} from {net.agent_label(self.origin)} over [{groups}] "
                f"in {self.t}..{self.t_prime} (run {self.run})")
