import random
from fractions import Fraction

import numpy as np
import pytest
from scipy.optimize import linprog as scipy_linprog

from commitorder.lp import linprog


def random_lp(rng):
    n, m_ub, m_eq = rng.randint(1, 6), rng.randint(0, 5), rng.randint(0, 3)

    def r():
        return Fraction(rng.randint(-5, 5), rng.randint(1, 4))

    c = [r() for _ in range(n)]
    A_ub = [[r() for _ in range(n)] for _ in range(m_ub)] + [[1] * n]
    b_ub = [r() for _ in range(m_ub)] + [10]
    A_eq = [[r() for _ in range(n)] for _ in range(m_eq)]
    b_eq = [r() for _ in range(m_eq)]
    return c, A_ub, b_ub, A_eq, b_eq


def float_reference(c, A_ub, b_ub, A_eq, b_eq):
    f = lambda rows: np.array(rows, dtype=float) if rows else None
    return scipy_linprog(
        -np.array(c, dtype=float), A_ub=f(A_ub), b_ub=f(b_ub), A_eq=f(A_eq), b_eq=f(b_eq),
        bounds=(0, None), method="highs",
    )


def test_agrees_with_highs_on_400_random_programs():
    rng = random.Random(1)
    seen = {"optimal": 0, "infeasible": 0}
    for _ in range(400):
        c, A_ub, b_ub, A_eq, b_eq = random_lp(rng)
        res = linprog(c, A_ub, b_ub, A_eq, b_eq)
        ref = float_reference(c, A_ub, b_ub, A_eq, b_eq)
        if ref.status == 2:
            assert res.status == "infeasible"
        else:
            assert ref.status == 0
            assert res.ok
            assert float(res.value) == pytest.approx(-ref.fun, abs=1e-7)
            x = res.x
            assert all(isinstance(v, Fraction) and v >= 0 for v in x)
            assert all(sum(a * v for a, v in zip(row, x)) <= b for row, b in zip(A_ub, b_ub))
            assert all(sum(a * v for a, v in zip(row, x)) == b for row, b in zip(A_eq, b_eq))
            assert sum(a * v for a, v in zip(c, x)) == res.value
        seen[res.status] += 1
    assert seen["optimal"] > 100 and seen["infeasible"] > 20


def test_exact_optimum_and_minimize():
    res = linprog([1, 1], A_ub=[[3, 1], [1, 3]], b_ub=[1, 1])
    assert res.value == Fraction(1, 2) and res.x == [Fraction(1, 4), Fraction(1, 4)]
    res = linprog([1, 2], A_eq=[[1, 1]], b_eq=[Fraction(1, 3)], maximize=False)
    assert res.value == Fraction(1, 3)


def test_unbounded_detected():
    assert linprog([1, 0], A_ub=[[0, 1]], b_ub=[1]).status == "unbounded"
