import json

import pytest

from core.errors import ParseError, ValidationError
from core.structures import StructureKind
from utils.scenario_loader import PROTOCOL_KINDS, SUITE_REQUIREMENTS, build_scenario, load_scenario

PAIR = {"agents": 2, "names": ["alice", "bob"], "links": [["alice", "bob", 2]]}


def _document(**sections):
    document = {"network": PAIR, "context": {"horizon": 3, "slots": [{"id": "go", "agent": "alice", "time": 0}]}}
    document.update(sections)
    return document


def test_missing_network_is_located():
    with pytest.raises(ValidationError) as caught:
        build_scenario({"context": {"horizon": 2}})
    assert "network" in caught.value.locations


def test_zero_bound_cites_the_minimum():
    document = _document(network={"agents": 2, "links": [[0, 1, 0]]})
    with pytest.raises(ValidationError) as caught:
        build_scenario(document)
    assert caught.value.locations == ["network"]
    assert "b_ij >= 1" in str(caught.value)


def test_every_network_problem_is_located():
    document = _document(network={"agents": 2, "channels": [[0, 0, 1], [0, 1, 0], [1, 7, 1]]})
    with pytest.raises(ValidationError) as caught:
        build_scenario(document)
    assert caught.value.locations == ["network", "network", "network"]
    messages = [message for _, message in caught.value.issues]
    assert any("self-channel" in m for m in messages)
    assert any("b_ij >= 1" in m for m in messages)
    assert any("unknown agent reference 7" in m for m in messages)


def test_centipede_query_with_a_crowded_level():
    document = _document(analysis={
        "structures": [{"kind": "centipede", "origin": "alice", "groups": [["alice", "bob"]], "t": 0, "t_prime": 2}],
    })
    with pytest.raises(ValidationError) as caught:
        build_scenario(document)
    assert caught.value.locations == ["analysis.structures[0]"]
    assert "one agent per level" in str(caught.value)


def test_every_issue_is_reported_at_once():
    document = _document(
        protocol={"kind": "telepathy"},
        analysis={"formulas": ["K[0]"], "theorems": ["no-such-suite"]},
    )
    with pytest.raises(ValidationError) as caught:
        build_scenario(document)
    locations = caught.value.locations
    assert "protocol.kind" in locations
    assert "analysis.formulas[0]" in locations
    assert "analysis.theorems" in locations
    assert str(caught.value).startswith("❌ Scenario validation failed with")


def test_slot_outside_horizon():
    document = _document(context={"horizon": 1, "slots": [{"id": "go", "agent": "bob", "time": 4}]})
    with pytest.raises(ValidationError) as caught:
        build_scenario(document)
    assert caught.value.locations == ["context"]


def test_snapshot_horizon_too_short():
    document = _document(protocol={"kind": "snapshot"})
    with pytest.raises(ValidationError) as caught:
        build_scenario(document)
    assert "context.horizon" in caught.value.locations


def test_suites_need_their_sections():
    document = _document(analysis={"theorems": ["gor-conformance", "snapshot-optimality"]})
    with pytest.raises(ValidationError) as caught:
        build_scenario(document)
    assert caught.value.locations == ["analysis.theorems", "analysis.theorems"]


def test_defaults():
    scenario = build_scenario(_document(), default_name="pair")
    assert scenario.name == "pair"
    assert scenario.protocol_kind == "full-information"
    assert scenario.trigger == "go"
    assert scenario.max_depth == 3


def test_formulas_and_structures_resolve_names():
    document = _document(analysis={
        "formulas": ["K[bob] occ(go)"],
        "structures": [{"kind": "broom", "origin": "alice", "groups": [["alice", "bob"]], "t": 0, "t_prime": 2}],
    })
    scenario = build_scenario(document)
    (text, formula), = scenario.formulas
    assert text == "K[bob] occ(go)"
    assert formula.agent == 1
    (query,) = scenario.structures
    assert query.kind is StructureKind.BROOM
    assert query.groups == (frozenset({0, 1}),)


def test_judea_loads(load):
    scenario = load("judea")
    assert scenario.ordering.triggers == {"Jedediah", "Jeremiah", "Brian"}
    assert len({r.cluster for r in scenario.ordering.responses.values()}) == 4
    assert scenario.trigger == "Jeremiah"


def test_judea_clusters_need_their_own_agents(load):
    scenario = load("judea")
    instigators = {scenario.network.resolve_agent(name) for name in scenario.ordering.triggers}
    clusters = {}
    for response in scenario.ordering.responses.values():
        clusters.setdefault(response.cluster, set()).add(response.agent)
    members = [instigators, *clusters.values()]
    assert sum(len(group) for group in members) == scenario.network.n_agents == 8
    assert set().union(*members) == set(range(8))


def test_every_reference_scenario_loads(scenario_dir):
    for path in sorted(scenario_dir.glob("*.json")):
        scenario = load_scenario(path)
        assert scenario.name == path.stem
        assert scenario.theorems


def test_unreadable_files(tmp_path):
    with pytest.raises(ParseError):
        load_scenario(tmp_path / "missing.json")
    broken = tmp_path / "broken.json"
    broken.write_text("{ not json", encoding="utf-8")
    with pytest.raises(ParseError, match="invalid JSON"):
        load_scenario(broken)
    listed = tmp_path / "list.json"
    listed.write_text(json.dumps([1, 2]), encoding="utf-8")
    with pytest.raises(ParseError):
        load_scenario(listed)


def test_ceiling_override_drops_cached_bundles(load):
    scenario = load("trivial")
    assert len(scenario.bundle()) == 2
    scenario.with_ceiling(1)
    assert scenario.context.ceiling == 1
    assert not scenario._bundles


def test_schema_document_tracks_the_loader(scenario_dir):
    schema = json.loads((scenario_dir.parent / "schemas" / "scenario.schema.json").read_text(encoding="utf-8"))
    properties = schema["properties"]
    analysis = properties["analysis"]["properties"]
    assert properties["protocol"]["properties"]["kind"]["enum"] == list(PROTOCOL_KINDS)
    assert set(analysis["theorems"]["items"]["enum"]) == set(SUITE_REQUIREMENTS)
    assert analysis["structures"]["items"]["properties"]["kind"]["enum"] == [k.value for k in StructureKind]
    for path in scenario_dir.glob("*.json"):
        assert set(json.loads(path.read_text(encoding="utf-8"))) <= set(properties)
