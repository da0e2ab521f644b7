"""Expected utilities, the two commitment-order solvers, verification, comparison."""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
import itertools
from math import gcd, lcm

import numpy as np

from .numerics import ONE, ZERO, decimal_string, eps_limit, format_rational
from .receiver import choose, joint_weights

__all__ = [
    "UtilityTriple",
    "Outcome",
    "outcomes",
    "expected_utilities",
    "GridConfig",
    "GridError",
    "EquilibriumReport",
    "DeviationReport",
    "OrderVerdict",
    "TransferRange",
    "candidate_kernels",
    "RELABEL_MODES",
    "solve_s1_first",
    "solve_s2_first",
    "verify_equilibrium",
    "order_matters",
    "transfer_range",
    "reference_notes",
]


@dataclass(frozen=True)
class UtilityTriple:
    s1: Fraction
    s2: Fraction
    receiver: Fraction

    def as_tuple(self):
        return (self.s1, self.s2, self.receiver)

    def to_dict(self):
        return {
            k: {"exact": format_rational(v), "decimal": decimal_string(v)}
            for k, v in zip(("s1", "s2", "receiver"), self.as_tuple())
        }


@dataclass(frozen=True)
class Outcome:
    """One reachable signal pair: its state weights and the receiver's action."""

    w1: str
    w2: str
    weights: tuple  # Eps per state, unnormalized joint probability
    action: int


def outcomes(s, g1, g2) -> list:
    out = []
    for w1 in g1.signals:
        for w2 in g2.signals:
            wts = joint_weights(s, g1, g2, w1, w2)
            if not any(wts):
                continue
            out.append(Outcome(w1, w2, tuple(wts), choose(s, wts)))
    return out


def expected_utilities(s, g1, g2) -> UtilityTriple:
    """Exact expected utilities in the limit of vanishing tilts."""
    u1 = u2 = ur = ZERO
    for o in outcomes(s, g1, g2):
        a = o.action
        for t, w in enumerate(o.weights):
            if not w:
                continue
            u1 = u1 + w * s.u1[t][a]
            u2 = u2 + w * s.u2[t][a]
        ur = ur + o.weights[a]
    return UtilityTriple(eps_limit(u1), eps_limit(u2), eps_limit(ur))


# -- search configuration and reports -------------------------------------


@dataclass(frozen=True)
class GridConfig:
    """Discretization used by the order solvers and the deviation checks.

    ``step`` is the S1 kernel grid.  Interim beliefs for S1's deviation LP
    are the directions of all grid columns while there are at most
    ``max_directions`` of them, otherwise the simplex grid of the same step.
    S2's candidate kernels per S1 signal are the pooling and truthful kernels
    plus S2's best responses at interim directions of ``candidate_step``.
    """

    step: Fraction = Fraction(1, 60)
    candidate_step: Fraction = Fraction(1, 12)
    max_directions: int = 6000
    max_s1_kernels: int = 50_000
    coarse_step: Fraction = Fraction(1, 6)

    def __post_init__(self):
        for name in ("step", "candidate_step", "coarse_step"):
            v = Fraction(getattr(self, name))
            if v <= 0 or v > 1 or v.numerator != 1:
                raise GridError(f"{name} must be 1/N for a positive integer N, got {v}")
            object.__setattr__(self, name, v)

    @property
    def n(self) -> int:
        return self.step.denominator

    def to_dict(self):
        return {
            "step": format_rational(self.step),
            "candidate_step": format_rational(self.candidate_step),
            "coarse_step": format_rational(self.coarse_step),
            "max_directions": self.max_directions,
            "max_s1_kernels": self.max_s1_kernels,
        }


class GridError(ValueError):
    """The requested search cannot be carried out on the configured grid."""


@dataclass
class DeviationReport:
    """Outcome of :func:`verify_equilibrium`."""

    passed: bool
    order: str
    late: dict
    early: dict
    utilities: UtilityTriple

    def __bool__(self):
        return self.passed

    def to_dict(self):
        return {
            "passed": self.passed,
            "order": self.order,
            "utilities": self.utilities.to_dict(),
            "late_committer": self.late,
            "early_committer": self.early,
        }


@dataclass
class EquilibriumReport:
    order: str
    g1: object
    g2: object
    utilities: UtilityTriple
    grid: GridConfig
    deviation_certificate: DeviationReport | None = None
    notes: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    def to_dict(self):
        return {
            "order": self.order,
            "g1": self.g1.to_dict(),
            "g2": self.g2.to_dict(),
            "utilities": self.utilities.to_dict(),
            "grid": self.grid.to_dict(),
            "deviation_certificate": (
                self.deviation_certificate.to_dict() if self.deviation_certificate else None
            ),
            "notes": list(self.notes),
            "stats": dict(self.stats),
        }


def reference_notes(s, key: str, u: UtilityTriple) -> list:
    """Flag every externally reported value that differs from the computed one."""
    out = []
    for name, val in s.reference.get(key, {}).items():
        got = getattr(u, name, None)
        if got is not None and got != val:
            out.append(
                f"reported {name} utility {decimal_string(val)} for {key} differs from "
                f"computed {format_rational(got)} ({decimal_string(got)})"
            )
    return out


# -- S1 commits first -----------------------------------------------------


def _block_masses(s):
    mass = {b: Fraction(0) for b in s.blocks1}
    for i, t in enumerate(s.states):
        mass[s.block_of1[i]] += s.p[i]
    return [mass[b] for b in s.blocks1]


def _directions(s, grid: GridConfig):
    """Interim directions (integer vectors over S1 blocks, gcd-reduced)."""
    from ._tables import column_grid, compositions

    m, n = len(s.blocks1), grid.n
    live = [mass > 0 for mass in _block_masses(s)]
    if (n + 1) ** m - 1 <= grid.max_directions:
        raw = (tuple(int(v) for v in c) for c in column_grid(m, n))
    else:
        raw = compositions(n, m)
    seen, out = set(), []
    for c in raw:
        if not any(c) or any(v and not ok for v, ok in zip(c, live)):
            continue
        g = 0
        for v in c:
            g = gcd(g, v)
        d = tuple(v // g for v in c)
        if d not in seen:
            seen.add(d)
            out.append(d)
    return out


def _direction_weights(s, d):
    pos = {b: k for k, b in enumerate(s.blocks1)}
    return [s.p[i] * d[pos[s.block_of1[i]]] for i in range(s.n)]


def _concavify(rows, values, tiebreak=None):
    """Max of sum lam*values s.t. sum lam*rows[b] = 1, lam >= 0; ties by ``tiebreak``.

    Returns (value, second value or None, lam).
    """
    from .lp import linprog

    nb = len(rows[0]) if rows else 0
    A_eq = [[r[b] for r in rows] for b in range(nb)]
    b_eq = [1] * nb
    res = linprog(values, [], [], A_eq, b_eq)
    if not res.ok:
        raise GridError("no feasible split of the prior on this grid")
    if tiebreak is None:
        return res.value, None, res.x
    res2 = linprog(tiebreak, [], [], A_eq + [list(values)], b_eq + [res.value])
    return res.value, res2.value, res2.x


def _split_commitment(s, dirs, lam):
    """Commitment1 sending signal ``d`` with probability lam_d * d[b] from block b."""
    from .strategy import Commitment1

    used = [(d, l) for d, l in zip(dirs, lam) if l > 0]
    names, kernel = [], {b: {} for b in s.blocks1}
    for d, l in used:
        top = max(range(len(d)), key=lambda k: (d[k], -k))
        base = s.blocks1[top]
        name = base if base not in names else f"{base}#{len(names) + 1}"
        names.append(name)
        for k, b in enumerate(s.blocks1):
            if d[k]:
                kernel[b][name] = ONE * (l * d[k])
    for b in s.blocks1:
        if not kernel[b]:
            kernel[b] = {names[0]: ONE}
    return Commitment1(tuple(names), kernel)


def _s1_first_values(s, dirs, tiebreak="favor_s1"):
    from .persuasion import s2_best_response

    v1, v2 = [], []
    for d in dirs:
        wts = _direction_weights(s, d)
        mass = sum(wts, Fraction(0))
        br = s2_best_response(s, wts)
        sel = br.favor_s1 if tiebreak == "favor_s1" else br.favor_s2
        v1.append(mass * sel.s1_value)
        v2.append(mass * sel.s2_value)
    return v1, v2


def solve_s1_first(s, grid: GridConfig | None = None) -> EquilibriumReport:
    """S1 commits first: best split of the prior over grid interim beliefs.

    S2 answers every signal with her exact best response, ties going to S1
    (the receiver's tie-break order).  S1's problem is then a
    concavification over the direction grid, solved as one exact LP; ties
    between S1-optimal splits go to S2's utility, then to the LP's pivoting
    order.
    """
    from .persuasion import s2_full_best_response

    grid = grid or GridConfig()
    dirs = _directions(s, grid)
    if not dirs:
        raise GridError("grid contains no interim direction")
    v1, v2 = _s1_first_values(s, dirs)
    best1, best2, lam = _concavify(dirs, v1, v2)
    g1 = _split_commitment(s, dirs, lam)
    g2 = s2_full_best_response(s, g1, "favor_s1")
    u = expected_utilities(s, g1, g2)
    if (u.s1, u.s2) != (best1, best2):
        raise AssertionError("S1-first evaluation disagrees with the split LP")
    return EquilibriumReport(
        "s1_first",
        g1,
        g2,
        u,
        grid,
        notes=reference_notes(s, "s1_first", u),
        stats={"directions": len(dirs)},
    )


# -- S2 commits first -----------------------------------------------------


def _kernel_key(kernel):
    return tuple(
        sorted((j, tuple(sorted((w, v.value, v.tilt) for w, v in row.items() if v))) for j, row in kernel.items())
    )


def candidate_kernels(s, grid: GridConfig, extra=()) -> list:
    """S2 kernels (block2 -> {signal: Eps}) tried after each S1 signal."""
    from .persuasion import s2_best_response

    found, out = set(), []

    def add(k):
        key = _kernel_key(k)
        if key not in found:
            found.add(key)
            out.append(k)

    add({j: {"pool": ONE} for j in s.blocks2})
    add({j: {j: ONE} for j in s.blocks2})
    for k in extra:
        add(k)
    coarse = GridConfig(step=grid.candidate_step, max_directions=grid.max_directions)
    for d in _directions(s, coarse):
        br = s2_best_response(s, _direction_weights(s, d))
        add(br.favor_s1.kernel)
        add(br.favor_s2.kernel)
    return out


class _S1Grid:
    """Every S1 kernel on the grid with its columns, and per-kernel slot tables."""

    def __init__(self, s, n, max_kernels):
        from ._tables import column_grid, column_index, compositions

        self.s, self.n = s, n
        m = len(s.blocks1)
        self.k = k = m
        rows = list(compositions(n, k))
        count = len(rows) ** m
        if count > max_kernels:
            raise GridError(f"{count} S1 kernels at step 1/{n} exceed the limit {max_kernels}")
        self.rows = rows
        mats = list(itertools.product(range(len(rows)), repeat=m))
        self.mats = mats
        self.G = np.array(
            [[column_index([rows[r][j] for r in mat], n) for j in range(k)] for mat in mats],
            dtype=np.int64,
        )
        self.cols = column_grid(m, n)
        self._tables = {}
        self._rank = None

    def table(self, idx, kernel):
        from ._tables import slot_table

        if idx not in self._tables:
            self._tables[idx] = slot_table(self.s, kernel, self.cols, self.n)
        return self._tables[idx]

    def rank_order(self):
        """Per grid kernel, its columns sorted by interim belief (most block-0 first).

        Beliefs compare lexicographically over S1's blocks; unused columns go
        last and ties keep column order.
        """
        if self._rank is None:
            masses = _block_masses(self.s)
            den = 1
            for m in masses:
                den = lcm(den, m.denominator)
            w = np.array([int(m * den) for m in masses], dtype=np.int64)
            joint = self.cols[self.G] * w  # (kernels, k, m)
            total = joint.sum(axis=2)
            safe = np.where(total > 0, total, 1)
            keys = []
            for b in reversed(range(joint.shape[2])):
                keys.append(-(joint[:, :, b] / safe))
            keys.append(np.where(total > 0, 0, 1))
            # np.lexsort sorts by the last key first
            order = np.empty(self.G.shape, dtype=np.int64)
            idx = np.arange(self.k)
            for r in range(len(self.G)):
                order[r] = np.lexsort([idx] + [kk[r] for kk in keys])
            self._rank = order
        return self._rank

    def commitment(self, i, names, order=None):
        """Grid kernel ``i`` with column ``order[r]`` sent as ``names[r]``."""
        from .strategy import Commitment1

        order = list(range(self.k)) if order is None else list(order)
        label = {c: names[r] for r, c in enumerate(order)}
        mat = self.mats[i]
        kernel = {}
        for b, r in zip(self.s.blocks1, mat):
            kernel[b] = {
                label[j]: ONE * Fraction(c, self.n) for j, c in enumerate(self.rows[r]) if c
            }
        return Commitment1(tuple(names), kernel)


def _common(tabs, attr):
    """Integer arrays of ``attr`` brought to one denominator."""
    L = 1
    for t in tabs:
        L = lcm(L, t.scale)
    out = []
    for t in tabs:
        arr = getattr(t, attr)
        f = L // t.scale
        if arr.dtype != object and f > 1:
            peak = int(np.abs(arr).max(initial=0))
            if peak * f * len(tabs) >= 2**62:
                arr = arr.astype(object)
        out.append(arr * f if f > 1 else arr)
    return out, L


RELABEL_MODES = ("posterior_rank", "best_for_s2", "none")


def _s1_response(grid1: _S1Grid, kidx, kernels, relabel):
    """S1's best grid kernel when slot ``r`` carries S2 kernel ``kidx[r]``.

    ``relabel`` fixes how S1's signal tokens meet S2's slots:

    * ``posterior_rank``: slots are mock signals ordered by interim belief,
      so slot ``r`` applies to S1's ``r``-th ranked signal whatever its name;
    * ``best_for_s2``: S1 names her signals but may only use namings that S2
      weakly prefers to every renaming;
    * ``none``: names are taken at face value.

    Returns (kernel index, column order, s1, s2) with exact utilities.
    """
    k = grid1.k
    tabs = [grid1.table(i, kernels[i]) for i in kidx]
    G = grid1.G
    a1, L = _common(tabs, "s1")
    a2, _ = _common(tabs, "s2")
    rows = np.arange(len(G))
    if relabel == "posterior_rank":
        order = grid1.rank_order()
        cols = [G[rows, order[:, r]] for r in range(k)]
    else:
        order = None
        cols = [G[:, r] for r in range(k)]
    s1 = sum(a1[r][cols[r]] for r in range(k))
    s2 = sum(a2[r][cols[r]] for r in range(k))
    ok = np.ones(len(G), dtype=bool)
    if relabel == "best_for_s2" and len(set(kidx)) > 1:
        for perm in itertools.permutations(range(k)):
            if perm == tuple(range(k)):
                continue
            alt = sum(a2[perm[r]][cols[r]] for r in range(k))
            ok &= s2 >= alt
    cand = np.flatnonzero(ok)
    top = s1[cand].max()
    cand = cand[s1[cand] == top]
    best2 = s2[cand].max()
    i = int(cand[s2[cand] == best2][0])
    col_order = tuple(range(k)) if order is None else tuple(int(c) for c in order[i])
    return i, col_order, Fraction(int(s1[i]), L), Fraction(int(s2[i]), L)


def solve_s2_first(
    s,
    grid: GridConfig | None = None,
    *,
    enforce_permutation: bool = True,
    relabel: str = "posterior_rank",
    extra_kernels=(),
) -> EquilibriumReport:
    """S2 commits first: best assignment of candidate kernels to S1's signals.

    For each assignment S1 best-responds over her whole kernel grid.  With
    ``enforce_permutation`` S2 is protected against S1 reordering her signal
    tokens in the way ``relabel`` describes (see :func:`_s1_response`);
    without it S2 is limited to kernels that ignore S1's signal.
    """
    if relabel not in RELABEL_MODES[:2]:
        raise ValueError(f"relabel must be one of {RELABEL_MODES[:2]}")
    from .strategy import Commitment2

    grid = grid or GridConfig()
    kernels = candidate_kernels(s, grid, extra_kernels)
    grid1 = _S1Grid(s, grid.n, grid.max_s1_kernels)
    k = grid1.k
    names = list(s.blocks1)
    if enforce_permutation:
        assignments = itertools.product(range(len(kernels)), repeat=k)
    else:
        assignments = ((i,) * k for i in range(len(kernels)))
    best = None
    tried = 0
    mode = relabel if enforce_permutation else "none"
    for kidx in assignments:
        tried += 1
        i, order, v1, v2 = _s1_response(grid1, kidx, kernels, mode)
        if best is None or (v2, v1) > (best[4], best[3]):
            best = (kidx, i, order, v1, v2)
    kidx, i, order, v1, v2 = best
    g1 = grid1.commitment(i, names, order)
    signals, kern = [], {}
    for slot, ki in zip(names, kidx):
        for j, row in kernels[ki].items():
            kern[(j, slot)] = dict(row)
            for w in row:
                if w not in signals:
                    signals.append(w)
    g2 = Commitment2(tuple(signals), kern)
    u = expected_utilities(s, g1, g2)
    if (u.s1, u.s2) != (v1, v2):
        raise AssertionError("S2-first evaluation disagrees with the slot tables")
    key = "s2_first" if enforce_permutation else "s2_first_constant"
    return EquilibriumReport(
        "s2_first",
        g1,
        g2,
        u,
        grid,
        notes=reference_notes(s, key, u),
        stats={
            "candidate_kernels": len(kernels),
            "assignments": tried,
            "s1_kernels": len(grid1.G),
            "permutation_enforced": enforce_permutation,
            "relabel": mode,
        },
    )


# -- verification ---------------------------------------------------------


def _fmt(v):
    return {"exact": format_rational(v), "decimal": decimal_string(v)}


def _signal_utility(s, g1, g2, w1, table):
    out = ZERO
    for o in outcomes(s, g1, g2):
        if o.w1 == w1:
            for t, w in enumerate(o.weights):
                if w:
                    out = out + w * table[t][o.action]
    return eps_limit(out)


def _check_s2_responds(s, g1, g2):
    """S2 attains her exact sub-solver optimum after every reachable S1 signal."""
    from .persuasion import interim_weights, s2_best_response

    rows = []
    ok = True
    for w1 in g1.signals:
        wts = interim_weights(s, g1, w1)
        if not any(wts):
            continue
        mass = eps_limit(sum(wts, ZERO))
        if mass == 0:
            continue
        best = mass * s2_best_response(s, wts).s2_value
        got = _signal_utility(s, g1, g2, w1, s.u2)
        fine = got >= best
        ok = ok and fine
        rows.append({"signal": w1, "attained": _fmt(got), "optimal": _fmt(best), "ok": fine})
    return {"agent": "s2", "method": "exact sub-solver per S1 signal", "passed": ok, "signals": rows}


def _check_s1_split(s, u, grid):
    """No split of the prior on the direction grid gives S1 more (S2 answering optimally)."""
    dirs = _directions(s, grid)
    v1, _ = _s1_first_values(s, dirs)
    best, _, lam = _concavify(dirs, v1)
    out = {
        "agent": "s1",
        "method": "exact concavification LP over grid interim directions",
        "directions": len(dirs),
        "best_deviation_value": _fmt(best),
        "passed": best <= u.s1,
    }
    if best > u.s1:
        out["deviation"] = _split_commitment(s, dirs, lam).to_dict()
        out["gain"] = _fmt(best - u.s1)
    return out


def _slot_kernels(s, g1, g2):
    return [{j: dict(g2.kernel.get((j, w), {})) for j in s.blocks2} for w in g1.signals]


def _slot_values(s, kernel, d):
    """Exact S1 and S2 utility collected by a signal with direction ``d`` under ``kernel``."""
    base = _direction_weights(s, d)
    sigs = []
    for row in kernel.values():
        sigs.extend(w for w in row if w not in sigs)
    v1 = v2 = ZERO
    for w in sigs:
        wts = [ZERO if not b else kernel.get(s.block_of2[t], {}).get(w, ZERO) * b for t, b in enumerate(base)]
        if not any(wts):
            continue
        a = choose(s, wts)
        for t, x in enumerate(wts):
            if x:
                v1 = v1 + x * s.u1[t][a]
                v2 = v2 + x * s.u2[t][a]
    return eps_limit(v1), eps_limit(v2)


def _check_s1_responds(s, g1, g2, u, grid, relabel):
    """S1's reply to a fixed S2 commitment: no grid kernel gives her more.

    S2's kernels after ``g1.signals`` are read as slots in that order.
    """
    k = len(g1.signals)
    kernels = _slot_kernels(s, g1, g2)
    m = len(s.blocks1)
    from ._tables import compositions

    count = sum(1 for _ in compositions(grid.n, k)) ** m if k == m else None
    if count is not None and count <= grid.max_s1_kernels:
        grid1 = _S1Grid(s, grid.n, grid.max_s1_kernels)
        i, order, v1, _ = _s1_response(grid1, tuple(range(k)), kernels, relabel)
        out = {
            "agent": "s1",
            "method": f"S1 kernel grid, signal tokens matched to slots by {relabel}",
            "s1_kernels": len(grid1.G),
            "best_deviation_value": _fmt(v1),
            "passed": v1 <= u.s1,
        }
        if v1 > u.s1:
            out["deviation"] = grid1.commitment(i, list(g1.signals), order).to_dict()
            out["gain"] = _fmt(v1 - u.s1)
        return out
    # Too many kernels: bound S1 by an LP that may reuse a signal for
    # several interim directions.  A bound at or below her utility certifies.
    dirs = _directions(s, grid)
    cols, vals = [], []
    for slot, kern in enumerate(kernels):
        for d in dirs:
            cols.append((slot, d))
            vals.append(_slot_values(s, kern, d)[0])
    best, _, lam = _concavify([d for _, d in cols], vals)
    out = {
        "agent": "s1",
        "method": "LP bound over (signal, grid interim direction) pairs",
        "directions": len(dirs),
        "best_deviation_value": _fmt(best),
        "passed": best <= u.s1,
    }
    if best > u.s1:
        used = [(cols[i], l) for i, l in enumerate(lam) if l > 0]
        slots = [c[0] for c, _ in used]
        out["bound_attained"] = len(slots) == len(set(slots))
        out["gain"] = _fmt(best - u.s1)
        out["support"] = [
            {"signal": g1.signals[c[0]], "direction": list(c[1]), "weight": format_rational(l)}
            for c, l in used
        ]
    return out


def _check_s2_commits(s, g1, g2, u, grid, relabel):
    """No alternative S2 commitment (candidate kernels per S1 signal) pays S2 more."""
    k = len(g1.signals)
    m = len(s.blocks1)
    if k != m:
        return {"agent": "s2", "method": "skipped: S1 uses fewer signals than blocks", "passed": True}
    own = _slot_kernels(s, g1, g2)
    kernels = list(own) + candidate_kernels(s, grid)
    n = grid.n
    from ._tables import compositions

    if sum(1 for _ in compositions(n, k)) ** m > grid.max_s1_kernels:
        n = grid.coarse_step.denominator
    grid1 = _S1Grid(s, n, grid.max_s1_kernels)
    if len(kernels) ** k <= 5000:
        scope = "every assignment of candidate kernels"
        assignments = itertools.product(range(len(kernels)), repeat=k)
    else:
        scope = "single-signal changes of the given commitment"
        base = tuple(range(k))
        assignments = (
            base[:j] + (c,) + base[j + 1 :] for j in range(k) for c in range(len(kernels))
        )
    best = None
    tried = 0
    for kidx in assignments:
        tried += 1
        i, order, _, v2 = _s1_response(grid1, kidx, kernels, relabel)
        if best is None or v2 > best[3]:
            best = (kidx, i, order, v2)
    kidx, i, order, v2 = best
    out = {
        "agent": "s2",
        "method": f"{scope}; S1 replies on a 1/{n} kernel grid",
        "assignments": tried,
        "best_deviation_value": _fmt(v2),
        "passed": v2 <= u.s2,
    }
    if v2 > u.s2:
        out["gain"] = _fmt(v2 - u.s2)
        out["deviation_kernels"] = {
            w: {j: {x: str(v) for x, v in row.items()} for j, row in kernels[ki].items()}
            for w, ki in zip(g1.signals, kidx)
        }
        out["s1_reply"] = grid1.commitment(i, list(g1.signals), order).to_dict()
    return out


def verify_equilibrium(
    s, order: str, g1, g2, grid: GridConfig | None = None, *, relabel: str = "posterior_rank"
) -> DeviationReport:
    """Check the no-deviation conditions of ``order`` for a given commitment pair.

    For ``s2_first`` the signals of ``g1`` are taken to be listed in slot
    order (most block-0 interim belief first under ``posterior_rank``).
    """
    grid = grid or GridConfig()
    u = expected_utilities(s, g1, g2)
    if order == "s1_first":
        late = _check_s2_responds(s, g1, g2)
        early = _check_s1_split(s, u, grid)
    elif order == "s2_first":
        late = _check_s1_responds(s, g1, g2, u, grid, relabel)
        early = _check_s2_commits(s, g1, g2, u, grid, relabel)
    else:
        raise ValueError("order must be 's1_first' or 's2_first'")
    return DeviationReport(late["passed"] and early["passed"], order, late, early, u)


# -- comparing orders -----------------------------------------------------


@dataclass(frozen=True)
class OrderVerdict:
    matters: bool
    preference: dict  # agent -> "s1_first" | "s2_first" | "indifferent"
    differences: dict
    receiver_only: bool = False  # only the receiver's value differs

    def to_dict(self):
        return {
            "matters": self.matters,
            "preference": dict(self.preference),
            "differences": {k: _fmt(v) for k, v in self.differences.items()},
            "receiver_only": self.receiver_only,
        }


def order_matters(r1: EquilibriumReport, r2: EquilibriumReport, tol=Fraction(0)) -> OrderVerdict:
    """Compare the S1-first report ``r1`` with the S2-first report ``r2``.

    The verdict is decided by the senders' utilities.  When both senders are
    indifferent the receiver's value depends on which of their equally good
    commitments is selected, so a receiver-only difference is reported
    through ``preference`` and ``receiver_only`` without deciding the verdict.
    """
    if r1.order != "s1_first" or r2.order != "s2_first":
        raise ValueError("expected an s1_first report and an s2_first report")
    tol = Fraction(tol)
    pref, diff = {}, {}
    for agent in ("s1", "s2", "receiver"):
        a, b = getattr(r1.utilities, agent), getattr(r2.utilities, agent)
        diff[agent] = b - a
        if abs(a - b) <= tol:
            pref[agent] = "indifferent"
        else:
            pref[agent] = "s1_first" if a > b else "s2_first"
    matters = abs(diff["s1"]) > tol or abs(diff["s2"]) > tol
    return OrderVerdict(matters, pref, diff, not matters and abs(diff["receiver"]) > tol)


@dataclass(frozen=True)
class TransferRange:
    lower: Fraction
    upper: Fraction

    @property
    def empty(self) -> bool:
        return self.lower >= self.upper

    def to_dict(self):
        return {"lower": _fmt(self.lower), "upper": _fmt(self.upper), "empty": self.empty}


def transfer_range(r1: EquilibriumReport, r2: EquilibriumReport) -> TransferRange:
    """Side payments from S2 to S1 that make both prefer S2 committing first."""
    return TransferRange(
        r1.utilities.s1 - r2.utilities.s1,
        r2.utilities.s2 - r1.utilities.s2,
    )
