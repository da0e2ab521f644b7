"""Sender 2's best response at a fixed interim belief.

S2 uses one signal per receiver action (a recommendation).  A kernel
``x[j][a]`` (S2 block ``j``, recommended action ``a``) is *weakly obedient*
when, for every recommended ``a`` and every other action ``b``,
``mu(a) x[F2(a)][a] >= mu(b) x[F2(b)][a]``.  The receiver follows a weakly
obedient recommendation only if every exact tie is resolved in favour of
``a``; when it is not, an infinitesimal tilt ``x + e*d`` may still break
the tie the right way.  The optimum over kernels the receiver actually
obeys (tilts allowed) is found as follows:

1. solve the weak LP; if the optimizer admits an obedience-restoring tilt,
   its value is attained;
2. otherwise enumerate sets of used recommendations, keep those that can
   be obeyed strictly, and take the best weak LP restricted to such a set.

Step 2 is exact: once some kernel using exactly the set ``S`` is obeyed,
mixing it into any weakly obedient kernel supported on ``S`` gives an
obeyed kernel arbitrarily close to the latter.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction

from .lp import linprog
from .numerics import ONE, ZERO, Eps
from .receiver import Belief, UnreachableSignal

__all__ = [
    "InfoSetDistribution",
    "BestResponseSet",
    "interim_belief",
    "interim_weights",
    "s2_best_response",
    "s2_full_best_response",
    "KernelProblem",
    "same_best_response_face",
    "clear_cache",
]


@dataclass(frozen=True)
class InfoSetDistribution:
    weights: dict  # S1 block -> Fraction


@dataclass
class Selection:
    """One S2 kernel on the recommendation alphabet at a given interim belief."""

    kernel: dict  # S2 block -> {action state: Eps}
    s1_value: Fraction
    s2_value: Fraction


class BestResponseSet:
    """S2's optimal value at one interim belief, with the S1-extreme optimizers.

    The S1-best and S1-worst members of the optimal set are computed on
    first use.
    """

    def __init__(self, problem, s2_value, x, d):
        self._p = problem
        self.s2_value = s2_value
        self._x, self._d = x, d
        self._sel = {}
        self.exact = problem.exact
        self.support = tuple(problem.s.states[a] for a in problem.A)

    def _select(self, sign):
        if sign not in self._sel:
            p = self._p
            c1 = p.objective(p.s.u1)
            c2 = p.objective(p.s.u2)
            got = p.best([sign * v for v in c1], [(c2, self.s2_value)])
            x, d = (self._x, self._d) if got is None else (got[1], got[2])
            self._sel[sign] = Selection(p.kernel(x, d), p.dot(c1, x), self.s2_value)
        return self._sel[sign]

    @property
    def favor_s1(self) -> Selection:
        return self._select(1)

    @property
    def favor_s2(self) -> Selection:
        return self._select(-1)

    @property
    def s1_value_max(self) -> Fraction:
        return self.favor_s1.s1_value

    @property
    def s1_value_min(self) -> Fraction:
        return self.favor_s2.s1_value

    @property
    def strategies(self):
        return [self.favor_s1.kernel, self.favor_s2.kernel]

    def to_dict(self):
        from .numerics import format_eps, format_rational

        def kern(k):
            return {j: {a: format_eps(v) for a, v in row.items()} for j, row in k.items()}

        return {
            "s2_value": format_rational(self.s2_value),
            "s1_value_min": format_rational(self.s1_value_min),
            "s1_value_max": format_rational(self.s1_value_max),
            "favor_s1": kern(self.favor_s1.kernel),
            "favor_s2": kern(self.favor_s2.kernel),
            "exact_tie_priority": self.exact,
        }


# -- interim beliefs -------------------------------------------------------


def interim_weights(s, g1, w1) -> list:
    """Unnormalized P(state, w1) in state order (Eps entries)."""
    out = []
    for i in range(s.n):
        q = s.p[i]
        out.append(g1.prob(s.block_of1[i], w1) * q if q else ZERO)
    return out


def interim_belief(s, g1, w1):
    wts = interim_weights(s, g1, w1)
    total = ZERO
    for w in wts:
        total = total + w
    if not total:
        raise UnreachableSignal(f"signal {w1!r} has zero probability")
    probs = [w / total for w in wts]
    belief = Belief(dict(zip(s.states, probs)))
    agg = {b: Fraction(0) for b in s.blocks1}
    for i, pr in enumerate(probs):
        agg[s.block_of1[i]] += pr.value
    return belief, InfoSetDistribution(agg)


def _exact_vector(s, mu) -> tuple:
    if isinstance(mu, Belief):
        mu = mu.vector(s)
    vals = []
    for v in mu:
        if isinstance(v, Eps):
            if not v.is_exact:
                raise ValueError("the sub-solver needs an interim belief without tilt")
            v = v.value
        vals.append(Fraction(v))
    total = sum(vals)
    if total <= 0:
        raise UnreachableSignal("interim belief has no mass")
    return tuple(v / total for v in vals)


# -- the LP family at one interim belief -----------------------------------


class KernelProblem:
    """Recommendation kernels for S2 at interim belief ``mu``.

    States in one S2 block always keep the same relative weight, so only a
    block's heaviest state can ever be the receiver's choice; those are the
    only recommendations (``A``) and the only competitors (``B``) that matter.
    """

    def __init__(self, s, mu):
        self.s = s
        self.mu = _exact_vector(s, mu)
        self.exact = s.action_only
        self._prio = {}
        support = [i for i, m in enumerate(self.mu) if m > 0]
        if self.exact:
            t0 = support[0]
            for a in support:
                self._prio[a] = (s.u1[t0][a], s.u2[t0][a], -a)
        self.support = tuple(support)
        blocks = {}
        for i in support:
            blocks.setdefault(s.block_of2[i], []).append(i)
        self.J = tuple(blocks)
        A, B = [], []
        for j, members in blocks.items():
            top = max(self.mu[i] for i in members)
            leaders = [i for i in members if self.mu[i] == top]
            B.extend(leaders)
            if self.exact:
                A.append(max(leaders, key=self._prio.__getitem__))
            else:
                A.extend(leaders)
        self.A = tuple(sorted(A))
        self.B = tuple(sorted(B))
        self.jpos = {b: k for k, b in enumerate(self.J)}
        self.apos = {a: k for k, a in enumerate(self.A)}
        self.nv = len(self.J) * len(self.A)

    def var(self, j, a) -> int:
        return self.jpos[j] * len(self.A) + self.apos[a]

    def _same_block_row(self, a, b):
        """Tie-break form for two leaders of one S2 block, or None if it is constant.

        Such leaders always tie in weight, so the receiver compares S1's
        expected utility on the signal, then S2's; both are linear in x.
        """
        for table in (self.s.u1, self.s.u2):
            c = [Fraction(0)] * self.nv
            for t in self.support:
                d = table[t][a] - table[t][b]
                if d:
                    c[self.var(self.s.block_of2[t], a)] += self.mu[t] * d
            if any(c):
                return c
        return None

    def beats(self, b, a) -> bool:
        """True when the receiver breaks an exact (b, a) tie in favour of b."""
        if self.exact:
            return self._prio[b] > self._prio[a]
        if self.s.block_of2[a] == self.s.block_of2[b] and self._same_block_row(a, b) is None:
            return b < a
        return True  # priority depends on the belief: demand strictness

    # coefficient vectors --------------------------------------------------
    def objective(self, table) -> list:
        """Conditional expectation of ``table[t][a]`` as a linear form in x."""
        c = [Fraction(0)] * self.nv
        for t in self.support:
            j = self.s.block_of2[t]
            for a in self.A:
                u = table[t][a]
                if u:
                    c[self.var(j, a)] += self.mu[t] * u
        return c

    def obedience(self, a, b) -> list:
        """Coefficients of ``mu(a) x[F2 a][a] - mu(b) x[F2 b][a]``.

        For two leaders of one S2 block that form is identically zero and the
        receiver's utility tie-break takes its place.
        """
        if not self.exact and self.s.block_of2[a] == self.s.block_of2[b]:
            row = self._same_block_row(a, b)
            return row if row is not None else [Fraction(0)] * self.nv
        c = [Fraction(0)] * self.nv
        c[self.var(self.s.block_of2[a], a)] += self.mu[a]
        c[self.var(self.s.block_of2[b], a)] -= self.mu[b]
        return c

    def pairs(self):
        """(recommended, competitor) pairs whose obedience constraint can bind."""
        bo = self.s.block_of2
        return [
            (a, b)
            for a in self.A
            for b in self.B
            if b != a and (bo[a] != bo[b] or not self.exact)
        ]

    def weak_system(self, allowed=None):
        """(A_ub, b_ub, A_eq, b_eq) of weakly obedient kernels using only ``allowed``."""
        A_ub, b_ub, A_eq, b_eq = [], [], [], []
        for a, b in self.pairs():
            if allowed is not None and a not in allowed:
                continue
            A_ub.append([-v for v in self.obedience(a, b)])
            b_ub.append(0)
        for j in self.J:
            row = [Fraction(0)] * self.nv
            for a in self.A:
                row[self.var(j, a)] = Fraction(1)
            A_eq.append(row)
            b_eq.append(1)
        if allowed is not None:
            for j in self.J:
                for a in self.A:
                    if a not in allowed:
                        row = [Fraction(0)] * self.nv
                        row[self.var(j, a)] = Fraction(1)
                        A_eq.append(row)
                        b_eq.append(0)
        return A_ub, b_ub, A_eq, b_eq

    def used(self, x) -> frozenset:
        return frozenset(a for a in self.A if any(x[self.var(j, a)] for j in self.J))

    @staticmethod
    def dot(c, x):
        return sum((ci * xi for ci, xi in zip(c, x) if ci and xi), Fraction(0))

    # obedience-restoring tilt ----------------------------------------------
    def tilt(self, x):
        """Direction ``d`` such that ``x + e*d`` is obeyed, or None.

        Minimizes the l1 norm of ``d`` so reported tilts stay sparse.
        """
        S = self.used(x)
        cols = []  # (var index, sign)
        for j in self.J:
            for a in S:
                k = self.var(j, a)
                cols.append((k, 1))
                if x[k] > 0:
                    cols.append((k, -1))
        nc = len(cols)

        def lift(vec):
            return [vec[k] * sg for k, sg in cols]

        A_ub, b_ub, A_eq, b_eq = [], [], [], []
        need = False
        for a, b in self.pairs():
            if a not in S:
                continue
            ob = self.obedience(a, b)
            if self.dot(ob, x) != 0:
                continue
            strict = self.beats(b, a)
            need = need or strict
            A_ub.append([-v for v in lift(ob)])
            b_ub.append(-1 if strict else 0)
        if not need:
            return [Fraction(0)] * self.nv
        for j in self.J:
            row = [Fraction(0)] * self.nv
            for a in S:
                row[self.var(j, a)] = Fraction(1)
            A_eq.append(lift(row))
            b_eq.append(0)
        res = linprog([1] * nc, A_ub, b_ub, A_eq, b_eq, maximize=False)
        if not res.ok:
            return None
        d = [Fraction(0)] * self.nv
        for (k, sg), v in zip(cols, res.x):
            d[k] += sg * v
        return d

    def strict_point(self, S, extra):
        """A kernel using exactly ``S`` that the receiver obeys outright, or None.

        Ties the receiver would break the wrong way must be strict.
        """
        nv = self.nv
        A_ub, b_ub, A_eq, b_eq = self.weak_system(S)
        A_ub = [r + [Fraction(0)] for r in A_ub]
        A_eq = [r + [Fraction(0)] for r in A_eq]
        for c, rhs in extra:
            A_eq.append(list(c) + [Fraction(0)])
            b_eq.append(rhs)
        for a in S:
            row = [Fraction(0)] * (nv + 1)
            for j in self.J:
                row[self.var(j, a)] = Fraction(-1)
            row[nv] = Fraction(1)
            A_ub.append(row)
            b_ub.append(0)
        for a, b in self.pairs():
            if a in S and self.beats(b, a):
                A_ub.append([-v for v in self.obedience(a, b)] + [Fraction(1)])
                b_ub.append(0)
        top = [Fraction(0)] * nv + [Fraction(1)]
        A_ub.append(top)
        b_ub.append(1)
        res = linprog(top, A_ub, b_ub, A_eq, b_eq)
        if not res.ok or res.value <= 0:
            return None
        return res.x[:nv]

    def best(self, c, extra=()):
        """Max of ``c`` over obeyed kernels (limit value), with a tilted optimizer.

        ``extra`` is a list of (coefficients, rhs) equalities.  Returns
        ``(value, x, d)`` or None if nothing satisfies ``extra``.
        """
        A_ub, b_ub, A_eq, b_eq = self.weak_system()
        A_eq = A_eq + [list(r) for r, _ in extra]
        b_eq = b_eq + [rhs for _, rhs in extra]
        res = linprog(c, A_ub, b_ub, A_eq, b_eq)
        if not res.ok:
            return None
        d = self.tilt(res.x)
        if d is not None:
            return res.value, res.x, d
        return self._best_by_support(c, extra)

    def _best_by_support(self, c, extra):
        best = None
        bounded = []  # (set, bound) of sets already dominated
        for size in range(len(self.A), 0, -1):
            for S in itertools.combinations(self.A, size):
                S = frozenset(S)
                A_ub, b_ub, A_eq, b_eq = self.weak_system(S)
                A_eq = A_eq + [list(r) for r, _ in extra]
                b_eq = b_eq + [rhs for _, rhs in extra]
                if best is not None and any(S <= T and v <= best[0] for T, v in bounded):
                    continue
                res = linprog(c, A_ub, b_ub, A_eq, b_eq)
                if not res.ok:
                    continue
                if best is not None and res.value <= best[0]:
                    bounded.append((S, res.value))
                    continue
                y = self.strict_point(S, extra)
                if y is None:
                    continue
                x = res.x
                d = self.tilt(x)
                if d is None:
                    d = [yi - xi for yi, xi in zip(y, x)]
                best = (res.value, x, d)
                bounded.append((S, res.value))
        return best

    # kernels ------------------------------------------------------------------
    def kernel(self, x, d) -> dict:
        states = self.s.states
        out = {}
        for j in self.s.blocks2:
            if j not in self.jpos:
                out[j] = {states[self.A[0]]: ONE}
                continue
            row = {}
            for a in self.A:
                k = self.var(j, a)
                v = Eps(x[k], d[k])
                if v:
                    row[states[a]] = v
            out[j] = row
        return out


# -- public sub-solver ----------------------------------------------------

_CACHE: dict = {}


def clear_cache():
    _CACHE.clear()


def s2_best_response(s, interim) -> BestResponseSet:
    """S2's optimal recommendation kernels at ``interim`` (a Belief or weight vector)."""
    mu = _exact_vector(s, interim)
    key = (id(s), mu)
    hit = _CACHE.get(key)
    if hit is not None and hit[0] is s:
        return hit[1]
    prob = KernelProblem(s, mu)
    v2, x, d = prob.best(prob.objective(s.u2))
    out = BestResponseSet(prob, v2, x, d)
    _CACHE[key] = (s, out)
    return out


def s2_full_best_response(s, g1, s1_tiebreak: str = "favor_s1"):
    """Assemble S2's commitment by solving the sub-problem at every S1 signal."""
    from .strategy import Commitment2

    if s1_tiebreak not in ("favor_s1", "favor_s2"):
        raise ValueError("s1_tiebreak must be 'favor_s1' or 'favor_s2'")
    signals = tuple(s.states)
    kernel = {}
    for w1 in g1.signals:
        wts = interim_weights(s, g1, w1)
        if not any(wts):
            for j in s.blocks2:
                kernel[(j, w1)] = {signals[0]: ONE}
            continue
        br = s2_best_response(s, wts)
        sel = br.favor_s1 if s1_tiebreak == "favor_s1" else br.favor_s2
        for j, row in sel.kernel.items():
            kernel[(j, w1)] = row
    return Commitment2(signals, kernel)


def same_best_response_face(s, mu_a, mu_b) -> bool:
    """Whether two interim beliefs induce the same set of weakly optimal S2 kernels."""
    pa, pb = KernelProblem(s, mu_a), KernelProblem(s, mu_b)
    if pa.A != pb.A or pa.J != pb.J:
        return False
    return _face_within(pa, pb) and _face_within(pb, pa)


def _face_system(p):
    c2 = p.objective(p.s.u2)
    A_ub, b_ub, A_eq, b_eq = p.weak_system()
    # weak optimum, used as the defining inequality of the face
    wv = linprog(c2, A_ub, b_ub, A_eq, b_eq).value
    return c2, wv, A_ub, b_ub, A_eq, b_eq


def _face_within(p, q) -> bool:
    """Every point of p's weak optimal face satisfies q's face inequalities."""
    pc, pv, pA, pb, pE, pe = _face_system(p)
    qc, qv, qA, qb, _, _ = _face_system(q)
    A_ub = list(pA)
    b_ub = list(pb)
    A_eq = list(pE) + [pc]
    b_eq = list(pe) + [pv]
    for row, rhs in list(zip(qA, qb)) + [([-v for v in qc], -qv)]:
        res = linprog(row, A_ub, b_ub, A_eq, b_eq)
        if res.ok and res.value > rhs:
            return False
    return True
