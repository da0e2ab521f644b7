import json
import random
from fractions import Fraction as F

import pytest

from commitorder.conditions import (
    check_claim4,
    check_necessary,
    check_proposition,
    check_sufficient,
    collaborative_states,
    kernel_values,
    polar_opposite,
    SufficientSearchConfig,
)
from commitorder.equilibrium import solve_s1_first, solve_s2_first
from commitorder.persuasion import s2_best_response
from oracles import conditional_values, random_2x2
from support import scenario


def exact(entry):
    return F(entry["exact"])


@pytest.fixture(scope="module")
def ex31():
    return scenario("example_3_1")


def test_collaborative_and_polar(ex31):
    assert collaborative_states(ex31) == ("TR", "BR")
    assert polar_opposite(ex31, ["BL", "BR"])
    assert not polar_opposite(ex31, ["TL", "TR"])
    assert polar_opposite(ex31, [2, 3], strict=True) is False  # S1 indifferent between BL and BR


def test_proposition_on_example_3_1(ex31):
    rep = check_proposition(ex31)
    assert rep.satisfied and bool(rep)
    assert (rep.witness_info_set, rep.witness_collab_state) == ("B", "TR")
    sep = rep.inequality_values["s2_prefers_separation"]
    mix = rep.inequality_values["s1_prefers_mixing"]
    assert (exact(sep["lhs"]), exact(sep["rhs"])) == (2, F(18, 7))
    assert (exact(mix["lhs"]), exact(mix["rhs"])) == (2, 0)
    assert rep.condition2_certificate["holds"]
    assert json.dumps(rep.to_dict())


def test_proposition_fails_without_certificate():
    rep = check_proposition(scenario("silence"))
    assert not rep.satisfied
    assert not rep.condition2_certificate["holds"]


def test_claim_on_example_3_1(ex31):
    for solve in (solve_s1_first, solve_s2_first):
        rep = check_claim4(ex31, solve(ex31))
        assert rep.applicable and rep.holds and rep.disjunct == 1
        assert rep.revealing_signal == "B"


def test_claim_with_single_signal_is_vacuous():
    s = scenario("silence")
    rep = check_claim4(s, solve_s1_first(s))
    assert rep.disjunct == 2


@pytest.mark.parametrize(
    "name, triple",
    [("example_3_1", ("TR", "TL", "BR")), ("example_4_1", ("MC", "ML", "BC")), ("silence", ("1", "2", "3"))],
)
def test_necessary_witnesses(name, triple):
    rep = check_necessary(scenario(name))
    assert rep.order_may_matter
    assert rep.witnesses[0].triple == triple
    assert json.dumps(rep.to_dict())


def test_necessary_fails_for_aligned_senders():
    rep = check_necessary(scenario("aligned_senders"))
    assert not rep.order_may_matter and rep.witnesses == []


def test_sufficient_witness_inequalities(ex31):
    w = check_sufficient(ex31)
    assert w is not None and w.pair == ("T", "B")
    v = w.inequality_values
    assert v["same_response_structure"]
    at_beta, at_alpha = v["threat_optimal_at_beta"], v["threat_suboptimal_at_alpha"]
    assert exact(at_beta["lhs"]) == exact(at_beta["rhs"])
    assert exact(at_alpha["lhs"]) < exact(at_alpha["rhs"])
    loss = v["s1_loses_from_mixing"]
    assert exact(loss["lhs"]) < exact(loss["rhs"])
    assert exact(v["s2_prefers_y_alone"]["lhs"]) < exact(v["s2_prefers_y_alone"]["rhs"])
    assert exact(v["s1_prefers_x"]["lhs"]) > exact(v["s1_prefers_x"]["rhs"])
    assert 0 < w.alpha and 0 < w.beta
    assert json.dumps(w.to_dict())


def test_sufficient_finds_nothing_for_aligned_senders():
    assert check_sufficient(scenario("aligned_senders"), SufficientSearchConfig(max_den=8)) is None


def test_ratio_grid_is_bounded():
    r = SufficientSearchConfig(max_den=4).ratios(F(3, 2))
    assert r[0] == F(1, 4) and r[-1] == F(3, 2) and len(r) == len(set(r))


def test_kernel_values_match_tilted_evaluation():
    rng = random.Random(4)
    checked = 0
    for i in range(120):
        s = random_2x2(rng, action_only=bool(i % 2))
        mu = [F(rng.randint(0, 4)) if q else F(0) for q in s.p]
        if not any(mu):
            continue
        br = s2_best_response(s, mu)
        for k in (br.favor_s1.kernel, br.favor_s2.kernel):
            assert kernel_values(s, k, mu) == conditional_values(s, mu, k)
            checked += 1
    assert checked > 150


def _scenario_2x2(u1, u2, prior=("3/8", "1/16", "1/4", "5/16"), state_dependent=False):
    from commitorder.model import scenario_from_dict

    states = ["TL", "TR", "BL", "BR"]
    doc = {
        "states": states,
        "prior": dict(zip(states, prior)),
        "partition1": [["TL", "TR"], ["BL", "BR"]],
        "partition2": [["TL", "BL"], ["TR", "BR"]],
        "utility_s1": dict(zip(states, u1)),
        "utility_s2": dict(zip(states, u2)),
    }
    if state_dependent:
        doc["utility_s1"] = {f"{t}|{a}": u for t in states for a, u in zip(states, u1)}
    return scenario_from_dict(doc)


def test_necessary_reports_tie_witnesses():
    # S1 is indifferent among TL, TR, BL; only the weak pattern fits, and the
    # order does change S1's payoff (2 vs 39/20) in this scenario.
    s = _scenario_2x2(("2", "2", "2", "1"), ("2", "3", "4", "1"))
    rep = check_necessary(s)
    assert rep.order_may_matter
    assert rep.witnesses and all(w.variant.endswith("(ties)") for w in rep.witnesses)
    r1, r2 = solve_s1_first(s), solve_s2_first(s)
    assert (r1.utilities.s1, r2.utilities.s1) == (2, F(39, 20))


def test_necessary_withholds_certificate_for_state_dependent_utilities():
    u = ("1", "2", "3", "4")
    assert not check_necessary(_scenario_2x2(u, u)).order_may_matter
    rep = check_necessary(_scenario_2x2(u, u, state_dependent=True))
    assert rep.order_may_matter and not rep.applicable and rep.witnesses == []
