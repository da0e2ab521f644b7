import json
from fractions import Fraction

import pytest

from commitorder.model import ScenarioError, scenario_from_dict, scenario_to_dict, validate_scenario
from support import scenario

GOOD = ["example_3_1", "example_4_1", "appendix_a", "silence", "aligned_senders"]


def base_doc():
    return {
        "states": ["TL", "TR", "BL", "BR"],
        "prior": {"TL": "1/4", "TR": "1/4", "BL": "1/4", "BR": "1/4"},
        "partition1": [["TL", "TR"], ["BL", "BR"]],
        "partition2": [["TL", "BL"], ["TR", "BR"]],
        "utility_s1": {"TL": "1", "TR": "0", "BL": "0", "BR": "0"},
        "utility_s2": {"TL": "0", "TR": "1", "BL": "0", "BR": "0"},
    }


def kinds(doc):
    return {a for a, _ in validate_scenario(scenario_from_dict(doc)).violations}


@pytest.mark.parametrize("name", GOOD)
def test_bundled_scenarios_validate(name):
    assert validate_scenario(scenario(name)).valid


def test_bad_partition_reports_refinement_and_identification():
    rep = validate_scenario(scenario("bad_partition"))
    assert not rep.valid
    assert {a for a, _ in rep.violations} == {"A3", "A4"}
    assert json.dumps(rep.to_dict())


@pytest.mark.parametrize("name", GOOD)
def test_json_roundtrip(name):
    s = scenario(name)
    again = scenario_from_dict(json.loads(json.dumps(scenario_to_dict(s))))
    assert again == s
    assert again.reference == s.reference


def test_prior_must_sum_to_one():
    doc = base_doc()
    doc["prior"]["TL"] = "1/2"
    assert "prior" in kinds(doc)


def test_same_partition_violates_distinct_information():
    doc = base_doc()
    doc["partition2"] = doc["partition1"]
    assert "A2" in kinds(doc)


def test_single_block_is_not_coarser_than_states():
    doc = base_doc()
    doc["states"] = ["TL", "TR"]
    doc["prior"] = {"TL": "1/2", "TR": "1/2"}
    doc["partition1"] = [["TL"], ["TR"]]
    doc["partition2"] = [["TL", "TR"]]
    assert "A1" in kinds(doc)


def test_overlapping_blocks_are_not_a_partition():
    doc = base_doc()
    doc["partition1"] = [["TL", "TR"], ["TR", "BL", "BR"]]
    assert "partition" in kinds(doc)


def test_zero_prior_state_is_allowed():
    doc = base_doc()
    doc["prior"] = {"TL": "1/2", "TR": "1/2", "BL": "0", "BR": "0"}
    assert validate_scenario(scenario_from_dict(doc)).valid


def test_state_dependent_utilities():
    doc = base_doc()
    doc["utility_s1"] = {f"{t}|{a}": "1" if t == a else "0" for t in doc["states"] for a in doc["states"]}
    s = scenario_from_dict(doc)
    assert not s.action_only
    assert s.u1[0][0] == 1 and s.u1[0][1] == 0
    assert scenario_from_dict(scenario_to_dict(s)) == s


@pytest.mark.parametrize(
    "mutate",
    [
        lambda d: d.pop("prior"),
        lambda d: d.update(prior={"TL": "x"}),
        lambda d: d.update(partition1="TL"),
        lambda d: d.update(utility_s1=["1"]),
        lambda d: d.update(reference_values={"s1_first": {"s1": "?"}}),
    ],
)
def test_malformed_documents_raise(mutate):
    doc = base_doc()
    mutate(doc)
    with pytest.raises(ScenarioError):
        scenario_from_dict(doc)


def test_relabeled_maps_every_field():
    s = scenario("example_3_1")
    m = {t: t.lower() for t in s.states}
    r = s.relabeled(m)
    assert r.states == ("tl", "tr", "bl", "br")
    assert r.prior["tl"] == Fraction(1, 10)
    assert r.partition1["T"] == ("tl", "tr")
    assert r.u1 == s.u1 and r.u2 == s.u2
