import itertools
import random
from fractions import Fraction

import pytest

from commitorder.numerics import ONE, ZERO, Eps
from commitorder.receiver import UnreachableSignal, best_response, choose, joint_weights, posterior
from commitorder.strategy import silent1, truthful1, truthful2
from oracles import random_2x2, random_commitments
from support import scenario


def lexicographic_best(s, weights):
    """Exhaustive comparison of every action on (weight, S1 EU, S2 EU, -index)."""

    def eu(table, a):
        return sum((weights[t] * table[t][a] for t in range(s.n)), ZERO)

    keys = [(weights[a], eu(s.u1, a), eu(s.u2, a), -a) for a in range(s.n)]
    return max(range(s.n), key=lambda a: keys[a])


def random_cases(count, seed):
    rng = random.Random(seed)
    for i in range(count):
        s = random_2x2(rng, action_only=bool(i % 2))
        g1, g2 = random_commitments(rng, s, tilts=bool(i % 3))
        yield s, g1, g2


def test_posterior_normalization_on_random_cases():
    checked = 0
    for s, g1, g2 in random_cases(300, 1):
        for w1, w2 in itertools.product(g1.signals, g2.signals):
            wts = joint_weights(s, g1, g2, w1, w2)
            if not any(wts):
                with pytest.raises(UnreachableSignal):
                    posterior(s, g1, g2, w1, w2)
                continue
            b = posterior(s, g1, g2, w1, w2)
            assert b.total() == ONE
            assert all(b[t] >= 0 for t in s.states)
            total = sum(wts, ZERO)
            assert all(b[t] * total == w for t, w in zip(s.states, wts))
            checked += 1
    assert checked > 600


def test_best_response_is_lexicographic_optimum():
    for s, g1, g2 in random_cases(300, 2):
        for w1, w2 in itertools.product(g1.signals, g2.signals):
            wts = joint_weights(s, g1, g2, w1, w2)
            if not any(wts):
                continue
            expect = lexicographic_best(s, wts)
            assert choose(s, wts) == expect
            assert best_response(s, posterior(s, g1, g2, w1, w2)) == s.states[expect]


def test_choice_is_scale_invariant(rng):
    for _ in range(200):
        s = random_2x2(rng, action_only=False)
        wts = [Eps(rng.randint(0, 3), rng.randint(-2, 2)) for _ in range(4)]
        if not any(wts):
            continue
        c = Fraction(rng.randint(1, 9), rng.randint(1, 9))
        assert choose(s, wts) == choose(s, [w * c for w in wts])


def test_ties_go_to_s1_then_s2_then_index():
    s = scenario("example_3_1")
    flat = [Eps(1)] * 4
    assert s.states[choose(s, flat)] == "TR"  # S1's favourite
    s2_only = [ZERO, ZERO, Eps(1), Eps(1)]
    assert s.states[choose(s, s2_only)] == "BR"  # S1 indifferent, S2 prefers BR
    aligned_zero = [Eps(1), ZERO, Eps(1), ZERO]
    assert s.states[choose(s, aligned_zero)] == "TL"


def test_infinitesimal_tilt_breaks_weight_ties():
    s = scenario("example_3_1")
    wts = [ZERO, Eps(1, -1), ZERO, Eps(1)]
    assert s.states[choose(s, wts)] == "BR"


def test_truthful_pair_reveals_state():
    s = scenario("example_3_1")
    g1 = truthful1(s)
    g2 = truthful2(s, g1.signals)
    b = posterior(s, g1, g2, "T", "L")
    assert b["TL"] == ONE and best_response(s, b) == "TL"
    with pytest.raises(UnreachableSignal):
        posterior(s, silent1(s), g2, "silent", "nope")
