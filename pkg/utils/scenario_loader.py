"""
Scenario Loader - utils/scenario_loader.py
Reads JSON scenario files into validated Scenario objects, reporting every
problem at once with its location
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from core.coordination import (OJRSpec, Response, ResponseOrdering, check_completion_horizon, gor_protocol,
                               naive_response_protocol, scc_decompose, trigger_base)
from core.epistemics import Formula, events_of, parse_formula
from core.errors import (CoordinationError, EpistemicError, NetworkError, NetworkProblems, ParseError, SimulationError,
                         StructureError, ValidationError)
from core.network import Network, load_network
from core.simulator import (AgentProtocol, ContextParams, InputSlot, SystemBundle, build_system,
                            full_information_protocol, silent_protocol)
from core.snapshot import snapshot_horizon_bound, snapshot_protocol
from core.structures import StructureKind, StructureQuery

logger = logging.getLogger(__name__)

PROTOCOL_KINDS = ("silent", "full-information", "snapshot", "gor", "naive-response")
ORDERING_KINDS = ("gor", "naive-response")

# Suites and what they need from a scenario
SUITE_REQUIREMENTS = {
    "facts": (),
    "knowledge-gain": ("trigger",),
    "common-knowledge-gain": ("trigger",),
    "epistemic-sanity": ("trigger",),
    "nested-ck-at-responses": ("ojr",),
    "snapshot-optimality": ("snapshot",),
    "gor-conformance": ("ordering",),
    "required-structures": ("ordering",),
    "ordering-expectations": ("ordering",),
}


@dataclass(eq=False)
class Scenario:
    """A validated scenario: network, bounded context, protocol and analysis requests"""

    name: str
    network: Network
    context: ContextParams
    protocol_kind: str
    description: str = ""
    path: Optional[Path] = None
    ordering: Optional[ResponseOrdering] = None
    ojr: Optional[OJRSpec] = None
    trigger: Optional[str] = None
    formulas: Tuple[Tuple[str, Formula], ...] = ()
    structures: Tuple[StructureQuery, ...] = ()
    theorems: Tuple[str, ...] = ()
    expect: Dict[str, Any] = field(default_factory=dict)
    max_depth: int = 3
    max_group_size: int = 2
    max_ck_depth: int = 2
    _protocol: Optional[AgentProtocol] = field(default=None, repr=False)
    _bundles: Dict[int, SystemBundle] = field(default_factory=dict, repr=False)

    def protocol(self) -> AgentProtocol:
        if self._protocol is None:
            self._protocol = make_protocol(self.protocol_kind, self.ordering)
        return self._protocol

    def bundle(self, ceiling: Optional[int] = None) -> SystemBundle:
        """Exhaustive bundle of the scenario's protocol, built once per ceiling"""
        key = ceiling if ceiling is not None else self.context.ceiling
        if key not in self._bundles:
            self._bundles[key] = build_system(self.protocol(), self.context, key)
        return self._bundles[key]

    def with_ceiling(self, ceiling: int) -> "Scenario":
        self.context = ContextParams(self.network, self.context.horizon, self.context.slots, ceiling)
        self._bundles.clear()
        return self


def make_protocol(kind: str, ordering: Optional[ResponseOrdering] = None) -> AgentProtocol:
    if kind == "silent":
        return silent_protocol()
    if kind == "full-information":
        return full_information_protocol()
    if kind == "snapshot":
        return snapshot_protocol()
    if kind == "gor":
        return gor_protocol(ordering)
    if kind == "naive-response":
        return naive_response_protocol(ordering)
    raise ValueError(f"unknown protocol kind {kind!r}")


# ==================== LOADING ====================

def read_document(path: Union[str, Path]) -> Dict[str, Any]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"Cannot read scenario {path}: {e}") from e
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}") from e
    if not isinstance(data, dict):
        raise ParseError(f"{path}: the scenario root must be an object")
    return data


def load_scenario(path: Union[str, Path]) -> Scenario:
    """Parse and validate a scenario file"""
    data = read_document(path)
    scenario = build_scenario(data, default_name=Path(path).stem)
    scenario.path = Path(path)
    logger.info(f"✅ Loaded scenario {scenario.name} ({scenario.protocol_kind}, horizon {scenario.context.horizon})")
    return scenario


def build_scenario(data: Dict[str, Any], default_name: str = "scenario") -> Scenario:
    """Validate a scenario document, collecting every issue before failing"""
    issues: List[Tuple[str, str]] = []

    def issue(location: str, message: str):
        issues.append((location, message))

    # ==================== NETWORK ====================
    network: Optional[Network] = None
    if "network" not in data:
        issue("network", "missing section")
    elif not isinstance(data["network"], dict):
        issue("network", "must be an object")
    else:
        try:
            network = load_network(data["network"])
        except NetworkProblems as e:
            for problem in e.problems:
                issue("network", str(problem))
        except NetworkError as e:
            issue("network", str(e))

    # ==================== CONTEXT ====================
    context: Optional[ContextParams] = None
    raw_context = data.get("context")
    if raw_context is None:
        issue("context", "missing section")
    elif not isinstance(raw_context, dict):
        issue("context", "must be an object")
    else:
        horizon = raw_context.get("horizon")
        if not isinstance(horizon, int) or isinstance(horizon, bool) or horizon < 0:
            issue("context.horizon", f"must be a non-negative integer, got {horizon!r}")
        slots = []
        for position, raw in enumerate(raw_context.get("slots", [])):
            where = f"context.slots[{position}]"
            if not isinstance(raw, dict) or not {"id", "agent", "time"} <= set(raw):
                issue(where, "needs id, agent and time")
                continue
            if network is None:
                continue
            try:
                slots.append(InputSlot(str(raw["id"]), network.resolve_agent(raw["agent"]), raw["time"]))
            except NetworkError as e:
                issue(where, str(e))
        ceiling = raw_context.get("ceiling", 200_000)
        if network is not None and not any(loc.startswith("context") for loc, _ in issues):
            try:
                context = ContextParams(network, horizon, tuple(slots), ceiling)
            except (SimulationError, TypeError) as e:
                issue("context", str(e))

    # ==================== PROTOCOL ====================
    raw_protocol = data.get("protocol", {"kind": "full-information"})
    kind = raw_protocol.get("kind") if isinstance(raw_protocol, dict) else None
    ordering: Optional[ResponseOrdering] = None
    ojr: Optional[OJRSpec] = None
    if kind not in PROTOCOL_KINDS:
        issue("protocol.kind", f"must be one of {', '.join(PROTOCOL_KINDS)}, got {kind!r}")
    elif kind in ORDERING_KINDS:
        if network is not None:
            ordering, ojr = _ordering_section(raw_protocol, network, issue)
        if ordering is not None:
            try:
                cro = scc_decompose(ordering)
            except CoordinationError as e:
                issue("protocol.ordering.edges", str(e))
            else:
                for action in sorted(ordering.responses):
                    if not trigger_base(ordering, action):
                        logger.warning(f"⚠️ Response {action} has no trigger below it and can never occur")
                logger.debug(f"Condensation has {len(cro.members)} nodes")
            if context is not None:
                missing = sorted(ordering.triggers - set(context.slot_ids))
                if missing:
                    issue("protocol.ordering.triggers", f"triggers without an input slot: {missing}")

    if network is not None and kind in ("snapshot",) + ORDERING_KINDS and not network.is_strongly_connected:
        issue("network", f"the {kind} protocol needs a strongly connected network")
    elif context is not None and not issues:
        if kind == "snapshot":
            bound = snapshot_horizon_bound(context)
            if context.horizon < bound:
                issue("context.horizon", f"snapshot scenarios need a horizon of at least {bound}")
        if kind == "gor" and ordering is not None:
            try:
                check_completion_horizon(ordering, context)
            except ValidationError as e:
                issues.extend(e.issues)

    # ==================== ANALYSIS ====================
    analysis = data.get("analysis", {})
    if not isinstance(analysis, dict):
        issue("analysis", "must be an object")
        analysis = {}
    event_ids = set(context.slot_ids) if context is not None else set()
    if ordering is not None:
        event_ids |= set(ordering.responses)
    if kind == "snapshot":
        event_ids.add("record_state")

    trigger = analysis.get("trigger")
    if trigger is None:
        trigger = ojr.trigger if ojr is not None else (context.slot_ids[0] if context and context.slots else None)
    elif context is not None and trigger not in context.slot_ids:
        issue("analysis.trigger", f"{trigger!r} is not an input slot")

    formulas = []
    for position, text in enumerate(analysis.get("formulas", [])):
        where = f"analysis.formulas[{position}]"
        try:
            formula = parse_formula(text, network.names if network else ())
        except EpistemicError as e:
            issue(where, str(e))
            continue
        unknown = sorted(events_of(formula) - event_ids)
        if unknown and context is not None:
            issue(where, f"unknown events {unknown}")
        formulas.append((text, formula))

    structures = []
    for position, raw in enumerate(analysis.get("structures", [])):
        where = f"analysis.structures[{position}]"
        if network is None:
            break
        try:
            structures.append(_structure_query(raw, network))
        except (KeyError, TypeError, ValueError) as e:
            issue(where, f"malformed query: {e}")
        except (NetworkError, StructureError) as e:
            issue(where, str(e))

    theorems = tuple(analysis.get("theorems", []))
    for name in theorems:
        needs = SUITE_REQUIREMENTS.get(name)
        if needs is None:
            issue("analysis.theorems", f"unknown suite {name!r}")
            continue
        if "trigger" in needs and trigger is None:
            issue("analysis.theorems", f"{name} needs an input slot to use as trigger")
        if "ojr" in needs and ojr is None:
            issue("analysis.theorems", f"{name} needs an ojr section")
        if "ordering" in needs and ordering is None:
            issue("analysis.theorems", f"{name} needs a response ordering")
        if "snapshot" in needs and kind != "snapshot":
            issue("analysis.theorems", f"{name} needs the snapshot protocol")

    if issues:
        raise ValidationError(issues)

    return Scenario(
        name=data.get("name", default_name),
        description=data.get("description", ""),
        network=network,
        context=context,
        protocol_kind=kind,
        ordering=ordering,
        ojr=ojr,
        trigger=trigger,
        formulas=tuple(formulas),
        structures=tuple(structures),
        theorems=theorems,
        expect=dict(analysis.get("expect", {})),
        max_depth=analysis.get("max_depth", 3),
        max_group_size=analysis.get("max_group_size", 2),
        max_ck_depth=analysis.get("max_ck_depth", 2),
    )


def _response(raw: Dict[str, Any], network: Network, cluster: Optional[str] = None) -> Response:
    return Response(str(raw["action"]), network.resolve_agent(raw["agent"]), raw.get("cluster", cluster))


def _ordering_section(raw: Dict[str, Any], network: Network, issue) -> Tuple[Optional[ResponseOrdering],
                                                                              Optional[OJRSpec]]:
    if "ojr" in raw:
        spec = raw["ojr"]
        try:
            clusters = tuple(
                tuple(_response(r, network, c.get("name")) for r in c["responses"])
                for c in spec["clusters"]
            )
            ojr = OJRSpec(str(spec["trigger"]), clusters)
            return ojr.to_ordering(), ojr
        except (KeyError, TypeError) as e:
            issue("protocol.ojr", f"malformed OJR section: {e}")
        except (NetworkError, CoordinationError) as e:
            issue("protocol.ojr", str(e))
        return None, None

    if "ordering" not in raw:
        issue("protocol", "ordered response protocols need an 'ordering' or 'ojr' section")
        return None, None
    spec = raw["ordering"]
    try:
        responses = {}
        for position, r in enumerate(spec.get("responses", [])):
            response = _response(r, network)
            if response.action in responses:
                issue(f"protocol.ordering.responses[{position}]", f"duplicate action {response.action!r}")
            responses[response.action] = response
        edges = frozenset(tuple(e) for e in spec.get("edges", []))
        return ResponseOrdering(frozenset(spec.get("triggers", [])), responses, edges), None
    except (KeyError, TypeError, ValueError) as e:
        issue("protocol.ordering", f"malformed ordering: {e}")
    except (NetworkError, CoordinationError) as e:
        issue("protocol.ordering", str(e))
    return None, None


def _structure_query(raw: Dict[str, Any], network: Network) -> StructureQuery:
    kind = StructureKind(raw["kind"])
    groups = tuple(frozenset(network.resolve_agent(a) for a in group) for group in raw["groups"])
    return StructureQuery(
        kind=kind,
        origin=network.resolve_agent(raw["origin"]),
        groups=groups,
        t=int(raw["t"]),
        t_prime=int(raw["t_prime"]),
        run=int(raw.get("run", 0)),
    )
