import json
from fractions import Fraction

import pytest

from commitorder.equilibrium import expected_utilities
from commitorder.numerics import Eps
from commitorder.strategy import (
    Commitment1,
    CommitmentError,
    commitment_from_dict,
    constant2,
    is_permutation_free,
    permute_signals,
    relabel_s1_in_g2,
    silent1,
    truthful1,
    truthful2,
)
from support import commitment, pair, scenario

PAIRS = [
    ("example_3_1", "example_3_1_s1_first"),
    ("example_3_1", "example_3_1_s2_first"),
    ("example_4_1", "example_4_1_s1_first"),
    ("example_4_1", "example_4_1_s2_first"),
    ("appendix_a", "appendix_a"),
]


@pytest.mark.parametrize("scen, prefix", PAIRS)
def test_fixture_commitments_are_well_formed(scen, prefix):
    s = scenario(scen)
    g1, g2 = pair(prefix)
    assert g1.problems(s) == []
    assert g2.problems(s, g1.signals) == []


@pytest.mark.parametrize("scen, prefix", PAIRS)
def test_commitment_json_roundtrip(scen, prefix):
    for g in pair(prefix):
        assert commitment_from_dict(json.loads(json.dumps(g.to_dict()))) == g


def test_tilted_rows_sum_to_one_exactly():
    g = commitment_from_dict({"signals": ["a", "b"], "kernel": {"T": {"a": "3/4 - e", "b": "1/4 + e"}, "B": {"a": "1"}}})
    assert g.has_tilt
    assert g.problems(scenario("example_3_1")) == []


def test_problems_reported():
    s = scenario("example_3_1")
    g = Commitment1(("a", "b", "c"), {"T": {"a": Eps(Fraction(1, 2))}})
    msgs = " ".join(g.problems(s))
    assert "exceed" in msgs and "missing row" in msgs and "sums to 1/2" in msgs


def test_malformed_commitment_raises():
    with pytest.raises(CommitmentError):
        commitment_from_dict({"signals": ["a"]})
    with pytest.raises(CommitmentError):
        commitment_from_dict({"signals": ["a"], "kernel": {"T": {"a": "half"}}})


def test_constructors():
    s = scenario("example_3_1")
    g1 = truthful1(s)
    g2 = truthful2(s, g1.signals)
    assert not g2.depends_on_w1()
    assert expected_utilities(s, g1, g2).receiver == 1
    quiet = silent1(s)
    assert quiet.signals == ("silent",)
    c = constant2({"L": {"x": "2/5 - e", "y": "3/5 + e"}, "R": {"x": "1"}}, ("x", "y"), g1.signals)
    assert not c.depends_on_w1() and c.has_tilt


def test_permutation_relabels_signals_and_is_checked():
    g1 = commitment("example_3_1_s1_first_g1")
    perm = {"T": "B", "B": "T"}
    p = permute_signals(g1, perm)
    assert p.prob("B", "B") == g1.prob("B", "T")
    assert permute_signals(p, perm) == g1
    with pytest.raises(CommitmentError):
        permute_signals(g1, {"T": "T", "B": "T"})


def test_consistent_relabelling_leaves_utilities_unchanged():
    s = scenario("example_3_1")
    g1, g2 = pair("example_3_1_s2_first")
    perm = {"T": "B", "B": "T"}
    assert expected_utilities(s, permute_signals(g1, perm), relabel_s1_in_g2(g2, perm)) == expected_utilities(s, g1, g2)


def test_permutation_free_detects_reorder_attack():
    s = scenario("example_3_1")
    g1, g2 = pair("example_3_1_s2_first")
    swapped = permute_signals(g1, {"T": "B", "B": "T"})
    # S2's kernel is tuned to S1's naming, so the swap must hurt S2 and the
    # original naming is a witness against the swapped one.
    check = is_permutation_free(s, g2, [swapped], "fixture")
    assert not check.free
    assert check.witness.gain > 0
    assert json.dumps(check.to_dict())
    assert is_permutation_free(s, truthful2(s, g1.signals), [g1]).free
