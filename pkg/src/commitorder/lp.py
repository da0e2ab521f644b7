"""Exact linear programming over the rationals.

Two-phase tableau simplex with Bland's rule.  The tableau is kept
fraction-free: every row is an integer vector, and a pivot rescales the
touched rows by the pivot element and divides out the row gcd.  The pivot
and ratio-test kernels come from :mod:`._backend` (compiled core or the
pure-Python reference in :mod:`._pycore`).
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import _backend
from ._pycore import normalize as _normalize

__all__ = ["LPResult", "linprog", "Infeasible", "Unbounded"]


class Infeasible(ArithmeticError):
    pass


class Unbounded(ArithmeticError):
    pass


@dataclass
class LPResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    value: Fraction | None = None
    x: list | None = None

    @property
    def ok(self) -> bool:
        return self.status == "optimal"


def _scaled(vals):
    """Integer multiple ``m * vals`` of a rational vector, and ``m``."""
    m = 1
    for v in vals:
        if v:
            d = v.denominator
            if d != 1 and m % d:
                m = lcm(m, d)
    if m == 1:
        return [int(v) for v in vals], 1
    return [v.numerator * (m // v.denominator) if v else 0 for v in vals], m


def _int_row(coeffs, rhs):
    """Scale a rational row to integers (last entry is the right-hand side)."""
    return _scaled(list(coeffs) + [rhs])[0]


def _run(rows, basis, objrow_holder, ncols, allowed):
    pivot = _backend.pivot
    step = _backend.bland_step
    while True:
        obj = objrow_holder[0]
        # the objective row has a positive scale in its rhs-free form; signs suffice
        res = step(rows, basis, obj, ncols, allowed)
        if res is None:
            return "optimal"
        r, c = res
        if r < 0:
            return "unbounded"
        pivot(rows, objrow_holder, r, c)
        basis[r] = c


def linprog(c, A_ub=(), b_ub=(), A_eq=(), b_eq=(), maximize=True) -> LPResult:
    """Optimize ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq``, ``x >= 0``.

    All inputs are rationals (``int``/``Fraction``); the result is exact.
    """
    n = len(c)
    cons = []  # (coeffs, rhs, kind) with kind in {"le", "eq"}
    for row, rhs in zip(A_ub, b_ub):
        cons.append((list(row), Fraction(rhs), "le"))
    for row, rhs in zip(A_eq, b_eq):
        cons.append((list(row), Fraction(rhs), "eq"))

    # column layout: x (n) | slack/surplus (one per "le") | artificial (as needed)
    n_slack = sum(1 for _, _, k in cons if k == "le")
    need_art = []
    for coeffs, rhs, kind in cons:
        need_art.append(kind == "eq" or rhs < 0)
    n_art = sum(need_art)
    ncols = n + n_slack + n_art

    rows = []
    basis = []
    si = n
    ai = n + n_slack
    for (coeffs, rhs, kind), art in zip(cons, need_art):
        body, scale = _scaled(coeffs + [rhs])
        r = body[-1]
        full = body[:n] + [0] * (ncols - n) + [r]
        if kind == "le":
            full[si] = scale  # slack coefficient 1 before scaling
            slack_col = si
            si += 1
        if r < 0:
            full = [-v for v in full]
        if art:
            full[ai] = 1
            basis.append(ai)
            ai += 1
        else:
            basis.append(slack_col)
        rows.append(_normalize(full))

    art_cols = set(range(n + n_slack, ncols))

    if n_art:
        # phase 1: maximize -sum(artificials); express in non-basic terms
        arts = [(row, row[basis[i]]) for i, row in enumerate(rows) if basis[i] in art_cols]
        L = 1
        for _, a in arts:
            L = lcm(L, a)
        obj = [0] * (ncols + 1)
        for row, a in arts:
            f = L // a
            for k in range(ncols + 1):
                if row[k]:
                    obj[k] += f * row[k]
        # artificial columns are basic: zero reduced cost
        for k in art_cols:
            obj[k] = 0
        obj = _normalize(obj)
        holder = [obj]
        allowed = [True] * ncols
        status = _run(rows, basis, holder, ncols, allowed)
        if status != "optimal":
            return LPResult("infeasible")
        # remaining infeasibility = sum of basic artificial values
        infeas = Fraction(0)
        for i, b in enumerate(basis):
            if b in art_cols:
                infeas += Fraction(rows[i][-1], rows[i][b])
        if infeas != 0:
            return LPResult("infeasible")
        # drive basic artificials out
        keep = []
        for i, b in enumerate(basis):
            if b not in art_cols:
                keep.append(i)
                continue
            col = next(
                (k for k in range(n + n_slack) if rows[i][k] != 0), None
            )
            if col is None:
                continue  # redundant row
            _backend.pivot(rows, [[0] * (ncols + 1)], i, col)
            basis[i] = col
            keep.append(i)
        rows = [rows[i] for i in keep]
        basis = [basis[i] for i in keep]
        allowed = [k not in art_cols for k in range(ncols)]
    else:
        allowed = [True] * ncols

    # phase 2 objective row: reduced costs for maximizing sign*c
    sign = 1 if maximize else -1
    cf = [Fraction(sign) * Fraction(v) for v in c] + [Fraction(0)] * (ncols - n)
    mult = 1
    for v in cf:
        mult = lcm(mult, v.denominator)
    obj = [int(v * mult) for v in cf] + [0]
    for i, b in enumerate(basis):
        f = obj[b]
        if f:
            row = rows[i]
            a = row[b]
            obj = _normalize([obj[k] * a - f * row[k] for k in range(ncols + 1)])
    for k in art_cols:
        obj[k] = 0
    holder = [obj]
    status = _run(rows, basis, holder, ncols, allowed)
    if status == "unbounded":
        return LPResult("unbounded")

    x = [Fraction(0)] * ncols
    for i, b in enumerate(basis):
        x[b] = Fraction(rows[i][-1], rows[i][b])
    xs = x[:n]
    value = sum((Fraction(cv) * xv for cv, xv in zip(c, xs)), Fraction(0))
    return LPResult("optimal", value, xs)
