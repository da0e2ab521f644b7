import json
from fractions import Fraction as F

import pytest

from commitorder.equilibrium import (
    GridConfig,
    GridError,
    expected_utilities,
    order_matters,
    outcomes,
    solve_s1_first,
    solve_s2_first,
    transfer_range,
    verify_equilibrium,
)
from commitorder.strategy import permute_signals, relabel_s1_in_g2
from oracles import random_2x2, random_commitments
from support import commitment, scenario

# Exact evaluations of the bundled commitment pairs, recomputed by hand from
# the joint signal tables.
PAIR_VALUES = [
    ("example_3_1", "example_3_1_s1_first_g1", "example_3_1_s1_first_g2", (F(27, 20), F(39, 20), F(2, 5))),
    ("example_3_1", "example_3_1_s2_first_g1", "example_3_1_s2_first_g2", (F(13, 10), F(11, 5), F(2, 5))),
    ("example_3_1", "example_3_1_s1_first_g1", "example_3_1_simultaneous_g2", (F(27, 20), F(39, 20), F(2, 5))),
    ("example_4_1", "example_4_1_s1_first_g1", "example_4_1_s1_first_g2", (F(2423, 1000), F(2759, 1000), F(7, 20))),
    ("example_4_1", "example_4_1_s2_first_g1", "example_4_1_s2_first_g2", (F(499, 200), F(619, 200), F(7, 20))),
    ("appendix_a", "appendix_a_g1", "appendix_a_g2", (F(143, 50), F(47, 25), F(1, 2))),
    ("appendix_a", "appendix_a_g1", "appendix_a_constant_g2", (F(67, 25), F(38, 25), F(31, 50))),
]


@pytest.mark.parametrize("scen, n1, n2, expect", PAIR_VALUES)
def test_fixture_pair_values(scen, n1, n2, expect):
    s = scenario(scen)
    assert expected_utilities(s, commitment(n1), commitment(n2)).as_tuple() == expect


def test_receiver_value_is_probability_of_matching(rng):
    for _ in range(50):
        s = random_2x2(rng)
        g1, g2 = random_commitments(rng, s, tilts=True)
        u = expected_utilities(s, g1, g2)
        assert 0 <= u.receiver <= 1
        mass = sum(sum(o.weights, start=0 * o.weights[0]) for o in outcomes(s, g1, g2))
        assert mass.value == 1


@pytest.fixture(scope="module")
def ex31():
    s = scenario("example_3_1")
    return s, solve_s1_first(s), solve_s2_first(s)


def test_example_3_1_orders(ex31):
    s, r1, r2 = ex31
    assert r1.utilities.as_tuple() == (F(27, 20), F(39, 20), F(2, 5))
    assert r2.utilities.as_tuple() == (F(13, 10), F(11, 5), F(2, 5))
    # S1's optimal split: T block always "T", B block "T" with probability 2/3.
    assert r1.g1.prob("B", r1.g1.signals[0]) + r1.g1.prob("B", r1.g1.signals[1]) == 1
    assert sorted(r1.g1.prob("B", w).value for w in r1.g1.signals) == [F(1, 3), F(2, 3)]
    assert order_matters(r1, r2).matters
    tr = transfer_range(r1, r2)
    assert (tr.lower, tr.upper) == (F(1, 20), F(1, 4)) and not tr.empty
    assert any("differs" in n for n in r2.notes)
    assert json.dumps(r1.to_dict()) and json.dumps(r2.to_dict())


def test_example_3_1_reports_verify(ex31):
    s, r1, r2 = ex31
    assert verify_equilibrium(s, "s1_first", r1.g1, r1.g2).passed
    assert verify_equilibrium(s, "s2_first", r2.g1, r2.g2).passed


def test_verify_rejects_non_best_response(ex31):
    s, r1, _ = ex31
    from commitorder.strategy import truthful2

    rep = verify_equilibrium(s, "s1_first", r1.g1, truthful2(s, r1.g1.signals))
    assert not rep.passed and not rep.late["passed"]
    with pytest.raises(ValueError):
        verify_equilibrium(s, "simultaneous", r1.g1, r1.g2)


def test_silence_orders():
    s = scenario("silence")
    r1 = solve_s1_first(s)
    assert len({w for row in r1.g1.kernel.values() for w, v in row.items() if v != 0}) == 1
    assert r1.utilities.as_tuple() == (F(39, 25), F(13, 25), F(1, 2))
    r2 = solve_s2_first(s)
    assert r2.utilities.as_tuple() == (F(24, 25), F(56, 25), F(29, 50))


def test_permutation_free_scenario_relabel_modes():
    s = scenario("appendix_a")
    assert solve_s2_first(s).utilities.as_tuple() == (F(509, 150), F(104, 75), F(17, 30))
    assert solve_s2_first(s, relabel="best_for_s2").utilities.as_tuple() == (F(598, 175), F(481, 350), F(14, 25))
    loose = solve_s2_first(s, enforce_permutation=False)
    assert not loose.g2.depends_on_w1()


def test_state_relabelling_leaves_utilities_unchanged():
    s = scenario("example_3_1")
    r = s.relabeled({t: t.lower() + "'" for t in s.states})
    assert solve_s1_first(r).utilities == solve_s1_first(s).utilities
    assert solve_s2_first(r).utilities == solve_s2_first(s).utilities


def test_signal_relabelling_leaves_utilities_unchanged(rng):
    for _ in range(40):
        s = random_2x2(rng, action_only=False)
        g1, g2 = random_commitments(rng, s, tilts=True)
        perm = {"a": "b", "b": "a"}
        assert expected_utilities(s, permute_signals(g1, perm), relabel_s1_in_g2(g2, perm)) == expected_utilities(s, g1, g2)
        names = {t: "s" + t for t in s.states}
        assert expected_utilities(s.relabeled(names), g1, g2) == expected_utilities(s, g1, g2)


def test_order_verdict_tolerance():
    s = scenario("example_3_1")
    r1, r2 = solve_s1_first(s), solve_s2_first(s)
    assert not order_matters(r1, r2, tol=F(1)).matters
    assert order_matters(r1, r2).preference == {"s1": "s1_first", "s2": "s2_first", "receiver": "indifferent"}
    with pytest.raises(ValueError):
        order_matters(r2, r1)


def test_grid_config_validation():
    with pytest.raises(GridError):
        GridConfig(step=F(2, 7))
    assert GridConfig(step=F(1, 12)).n == 12
