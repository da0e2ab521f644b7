"""Checkers for when the commitment order can or cannot matter.

Every verdict carries the quantities it was decided on, as exact
rationals, so a reader can audit it.  Zero-prior states never take part in
an argmax or a triple.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import lcm

from .numerics import ZERO, Eps, decimal_string, eps_limit, format_rational

__all__ = [
    "collaborative_states",
    "polar_opposite",
    "kernel_values",
    "response_structure",
    "PropositionReport",
    "check_proposition",
    "ClaimReport",
    "check_claim4",
    "SufficientSearchConfig",
    "SufficientWitness",
    "check_sufficient",
    "NecessaryWitness",
    "NecessaryReport",
    "check_necessary",
]


def _fmt(v):
    return {"exact": format_rational(v), "decimal": decimal_string(v)}


def _pair(lhs, rhs):
    return {"lhs": _fmt(lhs), "rhs": _fmt(rhs)}


def _own(table, t):
    """Utility of the action matching state ``t`` when ``t`` is the state."""
    return table[t][t]


def _live_blocks(s):
    out = []
    for b in s.blocks1:
        if any(s.p[i] > 0 and s.block_of1[i] == b for i in range(s.n)):
            out.append(b)
    return out


def _members(s, block):
    return [i for i in range(s.n) if s.block_of1[i] == block and s.p[i] > 0]


def _block_belief(s, block):
    """Prior restricted to one S1 block (unnormalized joint weights)."""
    return [s.p[i] if s.block_of1[i] == block else Fraction(0) for i in range(s.n)]


# -- collaborative states -------------------------------------------------


def collaborative_states(s) -> tuple:
    """States whose own action is top for both senders within their S1 block."""
    out = []
    for t in s.support:
        block = _members(s, s.block_of1[t])
        if all(_own(s.u1, t) >= _own(s.u1, o) for o in block) and all(
            _own(s.u2, t) >= _own(s.u2, o) for o in block
        ):
            out.append(s.states[t])
    return tuple(out)


# -- proposition: collaborative state + credible threat -------------------


@dataclass
class PropositionReport:
    satisfied: bool
    witness_info_set: str | None = None
    witness_collab_state: str | None = None
    phi: tuple = ()
    inequality_values: dict = field(default_factory=dict)
    condition2_certificate: dict = field(default_factory=dict)
    polar_opposite: bool = False
    collaborative: tuple = ()
    effective_collaborative: tuple = ()
    candidates: list = field(default_factory=list)

    def __bool__(self):
        return self.satisfied

    def to_dict(self):
        return {
            "satisfied": self.satisfied,
            "witness_info_set": self.witness_info_set,
            "witness_collab_state": self.witness_collab_state,
            "phi": list(self.phi),
            "inequality_values": self.inequality_values,
            "condition2_certificate": self.condition2_certificate,
            "polar_opposite": self.polar_opposite,
            "collaborative_states": list(self.collaborative),
            "effective_collaborative_states": list(self.effective_collaborative),
            "candidates": self.candidates,
        }


def polar_opposite(s, states, strict: bool = False) -> bool:
    """Whether the senders rank the actions of ``states`` (names or indices) in opposite ways.

    Default: no pair is strictly better for both, and whenever S2 is
    indifferent S1 is too.  ``strict`` demands a strict reversal on every
    pair.
    """
    states = [s.index[t] if isinstance(t, str) else t for t in states]
    for m, n in itertools.combinations(states, 2):
        d1 = _own(s.u1, m) - _own(s.u1, n)
        d2 = _own(s.u2, m) - _own(s.u2, n)
        if strict:
            if d1 == 0 or d2 == 0 or (d1 > 0) == (d2 > 0):
                return False
            continue
        if d1 * d2 > 0:
            return False
        if d2 == 0 and d1 != 0:
            return False
    return True


def _revealing_signals(s, g1, block) -> list:
    """Reachable signals of ``g1`` that only ever come from ``block``."""
    from .persuasion import interim_weights

    out = []
    for w in g1.signals:
        wts = interim_weights(s, g1, w)
        live = [i for i, x in enumerate(wts) if eps_limit(x) > 0]
        if live and all(s.block_of1[i] == block for i in live):
            out.append(w)
    return out


def _solver_reports(s, grid, reports):
    from .equilibrium import GridError, solve_s1_first, solve_s2_first

    if reports is not None:
        return list(reports), []
    out, errors = [], []
    for solver in (solve_s1_first, solve_s2_first):
        try:
            out.append(solver(s, grid))
        except GridError as exc:
            errors.append(str(exc))
    return out, errors


def _info_set_values(s, block):
    from .persuasion import s2_best_response

    br = s2_best_response(s, _block_belief(s, block))
    return br.s2_value, br.s1_value_max, br.s1_value_min


def check_proposition(s, grid=None, *, strict_polar: bool = False, reports=None) -> PropositionReport:
    """Search for an S1 information set meeting all three conditions.

    Condition 2 is certified on the equilibria found by both order solvers
    on ``grid`` (or on ``reports`` when given); it fails when a solver
    cannot run on the grid.
    """
    collab = collaborative_states(s)
    cidx = [s.index[c] for c in collab]
    candidates = []
    effective = set()
    first = None
    for block in _live_blocks(s):
        v2, v1max, v1min = _info_set_values(s, block)
        phi = tuple(s.states[i] for i in _members(s, block))
        polar = polar_opposite(s, [s.index[x] for x in phi], strict_polar)
        for c in cidx:
            if s.block_of1[c] == block:
                continue
            sep = _own(s.u2, c) < v2
            mix = _own(s.u1, c) > v1max
            entry = {
                "info_set": block,
                "collab_state": s.states[c],
                "s2_prefers_separation": {**_pair(_own(s.u2, c), v2), "holds": sep},
                "s1_prefers_mixing": {**_pair(_own(s.u1, c), v1max), "holds": mix},
                "polar_opposite": polar,
            }
            if v1max != v1min:
                entry["s1_prefers_mixing_s2_worst_tiebreak"] = {
                    **_pair(_own(s.u1, c), v1min),
                    "holds": _own(s.u1, c) > v1min,
                }
            candidates.append(entry)
            if sep and mix:
                effective.add(s.states[c])
                if polar and first is None:
                    first = (block, c, phi, entry)
    report = PropositionReport(
        False,
        collaborative=collab,
        effective_collaborative=tuple(x for x in collab if x in effective),
        candidates=candidates,
    )
    if first is None:
        return report
    block, c, phi, entry = first
    found, errors = _solver_reports(s, grid, reports)
    checks = []
    ok = not errors and bool(found)
    for r in found:
        rev = _revealing_signals(s, r.g1, block)
        checks.append({"order": r.order, "revealing_signals": rev})
        ok = ok and bool(rev)
    report.condition2_certificate = {
        "holds": ok,
        "equilibria": checks,
        "errors": errors,
        "grid": found[0].grid.to_dict() if found else None,
    }
    report.witness_info_set = block
    report.witness_collab_state = s.states[c]
    report.phi = phi
    report.polar_opposite = True
    report.inequality_values = {
        "s2_prefers_separation": entry["s2_prefers_separation"],
        "s1_prefers_mixing": entry["s1_prefers_mixing"],
    }
    report.satisfied = ok
    return report


# -- claim on S1's per-signal utilities -----------------------------------


@dataclass
class ClaimReport:
    applicable: bool
    disjunct: int | None = None
    revealing_signal: str | None = None
    signal_values: dict = field(default_factory=dict)
    reason: str = ""

    @property
    def holds(self) -> bool:
        return self.disjunct is not None

    def to_dict(self):
        return {
            "applicable": self.applicable,
            "disjunct": self.disjunct,
            "revealing_signal": self.revealing_signal,
            "signal_values": {k: _fmt(v) for k, v in self.signal_values.items()},
            "reason": self.reason,
        }


def _conditional_s1(s, g1, g2) -> dict:
    from .equilibrium import outcomes

    num, den = {}, {}
    for o in outcomes(s, g1, g2):
        for t, w in enumerate(o.weights):
            if not w:
                continue
            num[o.w1] = num.get(o.w1, ZERO) + w * s.u1[t][o.action]
            den[o.w1] = den.get(o.w1, ZERO) + w
    out = {}
    for w in g1.signals:
        d = eps_limit(den.get(w, ZERO))
        if d > 0:
            out[w] = eps_limit(num[w]) / d
    return out


def check_claim4(s, r, info_set=None, collab_state=None) -> ClaimReport:
    """Which disjunct of the per-signal utility claim holds for equilibrium ``r``.

    Without an explicit witness the first (information set, collaborative
    state) pair where S1 strictly prefers the collaborative action is used.
    """
    values = _conditional_s1(s, r.g1, r.g2)
    if len(values) <= 1:
        return ClaimReport(True, 2, None, values, "a single realized signal: all signals tie")
    if info_set is None:
        for block in _live_blocks(s):
            _, v1max, _ = _info_set_values(s, block)
            for c in collaborative_states(s):
                ci = s.index[c]
                if s.block_of1[ci] != block and _own(s.u1, ci) > v1max:
                    info_set, collab_state = block, c
                    break
            if info_set is not None:
                break
        if info_set is None:
            return ClaimReport(False, None, None, values, "no collaborative state S1 prefers to mix toward")
    else:
        _, v1max, _ = _info_set_values(s, info_set)
        if not _own(s.u1, s.index[collab_state]) > v1max:
            return ClaimReport(False, None, None, values, "S1 does not prefer the collaborative action")
    rev = _revealing_signals(s, r.g1, info_set)
    if not rev:
        return ClaimReport(False, None, None, values, f"no signal reveals {info_set}")
    hat = max(rev, key=lambda w: values[w])
    top = max(values.values())
    if values[hat] < top:
        return ClaimReport(True, 1, hat, values, "the revealing signal is not S1's best signal")
    if len(set(values.values())) == 1:
        return ClaimReport(True, 2, hat, values, "every signal gives S1 the same utility")
    return ClaimReport(True, None, hat, values, "neither disjunct holds")


# -- sufficient condition -------------------------------------------------


@dataclass(frozen=True)
class SufficientSearchConfig:
    """Mixing ratios alpha, beta are rationals with denominators up to ``max_den``."""

    max_den: int = 24
    tilt_scales: tuple = (Fraction(1), Fraction(4))
    grid: object = None  # GridConfig for the regularity check

    def ratios(self, bound: Fraction) -> list:
        vals = {
            Fraction(a, b)
            for b in range(1, self.max_den + 1)
            for a in range(1, int(bound * b) + 1)
            if Fraction(a, b) <= bound
        }
        return sorted(vals)


@dataclass
class SufficientWitness:
    pair: tuple
    alpha: Fraction
    beta: Fraction
    threat_strategy: dict  # S2 block -> {signal: Eps}
    mock_signals: dict
    inequality_values: dict

    def to_dict(self):
        return {
            "pair": list(self.pair),
            "alpha": format_rational(self.alpha),
            "beta": format_rational(self.beta),
            "threat_strategy": {
                j: {w: str(v) for w, v in row.items()} for j, row in self.threat_strategy.items()
            },
            "mock_signals": {
                k: {b: format_rational(v) for b, v in d.items()} for k, d in self.mock_signals.items()
            },
            "inequality_values": self.inequality_values,
        }


def _mixed_weights(s, x, y, ratio):
    """Joint weights of a signal with P(y | signal) / P(x | signal) = ``ratio``."""
    px = sum(s.p[i] for i in _members(s, x))
    py = sum(s.p[i] for i in _members(s, y))
    out = []
    for i in range(s.n):
        b = s.block_of1[i]
        if b == x:
            out.append(s.p[i] / px)
        elif b == y:
            out.append(ratio * s.p[i] / py)
        else:
            out.append(Fraction(0))
    return out


@lru_cache(maxsize=64)
def _int_utilities(s):
    du = 1
    for tab in (s.u1, s.u2):
        for row in tab:
            for u in row:
                du = lcm(du, u.denominator)
    return tuple(tuple(tuple(int(u * du) for u in row) for row in tab) for tab in (s.u1, s.u2)), du


def _pick(n, v, ti, U1, U2):
    """The receiver's choice on integer-scaled (value, tilt) weights."""
    top = max((v[a], ti[a]) for a in range(n))
    cands = [a for a in range(n) if (v[a], ti[a]) == top]
    for U in (U1, U2):
        if len(cands) == 1:
            break
        keys = {
            a: (sum(v[t] * U[t][a] for t in range(n)), sum(ti[t] * U[t][a] for t in range(n)))
            for a in cands
        }
        best = max(keys.values())
        cands = [a for a in cands if keys[a] == best]
    return cands[0]


def kernel_values(s, kernel, weights):
    """Conditional (S1, S2) utilities of S2 ``kernel`` at an interim belief.

    Exact; everything is scaled to integers by common denominators first.
    """
    (U1, U2), du = _int_utilities(s)
    n = s.n
    dw = 1
    for w in weights:
        dw = lcm(dw, Fraction(w).denominator)
    W = [int(w * dw) for w in weights]
    sigs = []
    for row in kernel.values():
        sigs.extend(w for w in row if w not in sigs)
    dk = 1
    for row in kernel.values():
        for e in row.values():
            dk = lcm(dk, e.value.denominator, e.tilt.denominator)
    acc1 = acc2 = 0
    for sig in sigs:
        v, ti = [0] * n, [0] * n
        for t in range(n):
            if not W[t]:
                continue
            e = kernel.get(s.block_of2[t], {}).get(sig)
            if e is None:
                continue
            v[t] = int(e.value * dk) * W[t]
            ti[t] = int(e.tilt * dk) * W[t]
        if not any(v) and not any(ti):
            continue
        a = _pick(n, v, ti, U1, U2)
        acc1 += sum(v[t] * U1[t][a] for t in range(n))
        acc2 += sum(v[t] * U2[t][a] for t in range(n))
    den = dk * du * sum(W)
    return Fraction(acc1, den), Fraction(acc2, den)


def _threat_candidates(s, br, scales):
    """Optimal kernels at a belief plus single-pair epsilon shifts of them."""
    out, seen = [], set()

    def add(k):
        key = tuple(sorted((j, tuple(sorted(r.items()))) for j, r in k.items()))
        if key not in seen:
            seen.add(key)
            out.append(k)

    for sel in (br.favor_s1, br.favor_s2):
        base = sel.kernel
        add(base)
        plain = {j: {w: Eps(v.value) for w, v in r.items() if v.value} for j, r in base.items()}
        add(plain)
        for j, row in base.items():
            sigs = list(row) + [w for r in base.values() for w in r if w not in row]
            for src, dst in itertools.permutations(dict.fromkeys(sigs), 2):
                if row.get(src, ZERO).value <= 0:
                    continue
                for c in scales:
                    for b in (base, plain):
                        new = {jj: dict(rr) for jj, rr in b.items()}
                        r = new[j]
                        r[src] = r.get(src, ZERO) - Eps(0, c)
                        r[dst] = r.get(dst, ZERO) + Eps(0, c)
                        add(new)
    return out


def _regularity(s, x, y, grid):
    """Both action groups keep positive probability in the S1-first optimum."""
    from .equilibrium import outcomes, solve_s1_first

    r = solve_s1_first(s, grid)
    mass = {x: ZERO, y: ZERO}
    for o in outcomes(s, r.g1, r.g2):
        b = s.block_of1[o.action]
        if b in mass:
            mass[b] = mass[b] + sum(o.weights, ZERO)
    mx, my = eps_limit(mass[x]), eps_limit(mass[y])
    return mx > 0 and my > 0, {
        "method": "action-group probabilities in the S1-first equilibrium on the grid",
        f"P(actions of {x})": _fmt(mx),
        f"P(actions of {y})": _fmt(my),
    }


def response_structure(br) -> tuple:
    """Support and tilt-sign pattern of both extreme S2 selections.

    Two best-response sets with the same structure recommend the same
    signals from the same S2 blocks and break the same ties the same way;
    only the mixing probabilities differ.
    """
    out = []
    for sel in (br.favor_s1, br.favor_s2):
        rows = []
        for j in sorted(sel.kernel):
            row = sel.kernel[j]
            rows.append(
                (j, tuple(sorted((w, v.value > 0, (v.tilt > 0) - (v.tilt < 0)) for w, v in row.items() if v)))
            )
        out.append(tuple(rows))
    return tuple(out)


def _face_runs(structures):
    """Maximal runs of consecutive ratios with the same response structure."""
    runs, start = [], 0
    for i in range(1, len(structures) + 1):
        if i == len(structures) or structures[i] != structures[i - 1]:
            runs.append((start, i))
            start = i
    return runs


def _pair_witness(s, x, y, ratios, search, bx, by, mass):
    from .persuasion import s2_best_response, same_best_response_face

    v2y = by.s2_value
    weights = [_mixed_weights(s, x, y, r) for r in ratios]
    brs = [s2_best_response(s, w) for w in weights]
    threat_ok = [br.s2_value < v2y for br in brs]
    if not any(threat_ok[:-1]):
        return None
    wy = _block_belief(s, y)
    regularity = None
    for lo, hi in _face_runs([response_structure(br) for br in brs]):
        for bi in range(lo, hi - 1):
            if not threat_ok[bi]:
                continue
            beta, brb = ratios[bi], brs[bi]
            threats = []
            for k in _threat_candidates(s, brb, search.tilt_scales):
                kb1, kb2 = kernel_values(s, k, weights[bi])
                if kb2 == brb.s2_value:
                    threats.append((k, kb1, kb2, None))
            for ai in range(bi + 1, hi):
                alpha, bra = ratios[ai], brs[ai]
                for n, (k, kb1, kb2, s1y) in enumerate(threats):
                    ka1, ka2 = kernel_values(s, k, weights[ai])
                    if not ka2 < bra.s2_value:
                        continue
                    if s1y is None:
                        s1y = kernel_values(s, k, wy)[0]
                        threats[n] = (k, kb1, kb2, s1y)
                    rhs = (1 + beta) / (1 + alpha) * kb1 + (alpha - beta) / (1 + alpha) * s1y
                    if not ka1 < rhs:
                        continue
                    if regularity is None:
                        regularity = _regularity(s, x, y, search.grid)
                    ok, reg = regularity
                    if not ok:
                        return None
                    lit = (mass[x] + beta * mass[y]) / (mass[x] + alpha * mass[y])
                    values = {
                        "same_response_structure": True,
                        "same_optimal_face": same_best_response_face(s, weights[ai], weights[bi]),
                        "threat_optimal_at_beta": _pair(kb2, brb.s2_value),
                        "threat_suboptimal_at_alpha": _pair(ka2, bra.s2_value),
                        "s1_loses_from_mixing": {
                            **_pair(ka1, rhs),
                            "s1_at_beta": _fmt(kb1),
                            "s1_at_y": _fmt(s1y),
                            "rhs_with_prior_mass_weights": _fmt(lit * kb1 + (1 - lit) * s1y),
                        },
                        "s2_prefers_y_alone": _pair(brb.s2_value, v2y),
                        "s1_prefers_x": _pair(bx.s1_value_min, by.s1_value_max),
                        "regularity": reg,
                    }
                    mock = {
                        "alpha": {x: 1 / (1 + alpha), y: alpha / (1 + alpha)},
                        "beta": {x: 1 / (1 + beta), y: beta / (1 + beta)},
                    }
                    return SufficientWitness((x, y), alpha, beta, k, mock, values)
    return None


def check_sufficient(s, search: SufficientSearchConfig | None = None, pairs=None):
    """First (pair, alpha, beta, threat) meeting the sufficient conditions, or None.

    Mock signals put weight 1/(1+r) on ``x`` and r/(1+r) on ``y``; a signal
    with ratio ``alpha`` splits into one with ratio ``beta`` (weight
    (1+beta)/(1+alpha)) and a pure ``y`` signal, which fixes the weights on
    the right of the S1 inequality.  Best-response sets count as equal when
    their :func:`response_structure` matches, and ``alpha`` is searched only
    in the run of consecutive grid ratios sharing ``beta``'s structure.
    """
    from .persuasion import s2_best_response

    search = search or SufficientSearchConfig()
    live = _live_blocks(s)
    mass = {b: sum(s.p[i] for i in _members(s, b)) for b in live}
    todo = pairs if pairs is not None else list(itertools.permutations(live, 2))
    for x, y in todo:
        bx = s2_best_response(s, _block_belief(s, x))
        by = s2_best_response(s, _block_belief(s, y))
        if not bx.s1_value_min > by.s1_value_max:
            continue
        ratios = search.ratios(mass[y] / mass[x])
        found = _pair_witness(s, x, y, ratios, search, bx, by, mass)
        if found is not None:
            return found
    return None


# -- necessary condition --------------------------------------------------


@dataclass(frozen=True)
class NecessaryWitness:
    triple: tuple
    sets: tuple  # (I1x, I1y, I2x, I2y)
    variant: str  # "standard" or "swapped", with " (ties)" when only weak inequalities hold
    values: dict

    def to_dict(self):
        return {
            "triple": list(self.triple),
            "sets": {"I1x": self.sets[0], "I1y": self.sets[1], "I2x": self.sets[2], "I2y": self.sets[3]},
            "variant": self.variant,
            "values": {k: _fmt(v) for k, v in self.values.items()},
        }


@dataclass
class NecessaryReport:
    order_may_matter: bool
    witnesses: list
    tie_break_flag: bool
    applicable: bool = True  # False for state-dependent utilities: no certificate is issued

    def __bool__(self):
        return self.order_may_matter

    def to_dict(self):
        return {
            "order_may_matter": self.order_may_matter,
            "witnesses": [w.to_dict() for w in self.witnesses],
            "tie_break_flag": self.tie_break_flag,
            "applicable": self.applicable,
        }


def _threat_pattern(lead, other, strict):
    """``lead`` prefers alpha to beta and gamma; ``other`` ranks gamma > alpha > beta."""
    if strict:
        return lead["a"] > max(lead["b"], lead["c"]) and other["c"] > other["a"] > other["b"]
    # weak version; each sender still needs one strict preference against beta
    return (
        lead["a"] >= max(lead["b"], lead["c"])
        and lead["a"] > lead["b"]
        and other["c"] >= other["a"] > other["b"]
    )


def check_necessary(s) -> NecessaryReport:
    """Every state triple whose structure and utilities allow a credible threat.

    The utility pattern is checked as stated and with the senders swapped.
    Triples that fit only once ties are allowed are reported with a
    " (ties)" variant: the strict pattern presumes strict preference orders,
    and an indifferent sender can still be threatened.  Utilities that depend
    on the state are outside the pattern's premises, so no "does not matter"
    certificate is issued for them.
    """
    out = []
    b1, b2 = s.block_of1, s.block_of2
    for a, b, c in itertools.permutations(s.support, 3):
        if b1[a] != b1[b] or b1[c] == b1[a]:
            continue
        if b2[a] == b2[b] or b2[c] not in (b2[a], b2[b]):
            continue
        u1 = {k: _own(s.u1, t) for k, t in zip("abc", (a, b, c))}
        u2 = {k: _own(s.u2, t) for k, t in zip("abc", (a, b, c))}
        values = {
            "U1(a_alpha)": u1["a"],
            "U1(a_beta)": u1["b"],
            "U1(a_gamma)": u1["c"],
            "U2(a_alpha)": u2["a"],
            "U2(a_beta)": u2["b"],
            "U2(a_gamma)": u2["c"],
        }
        sets = (b1[a], b1[c], b2[a], b2[b])
        triple = (s.states[a], s.states[b], s.states[c])
        for variant, lead, other in (("standard", u1, u2), ("swapped", u2, u1)):
            for strict in (True, False):
                if _threat_pattern(lead, other, strict):
                    name = variant if strict else variant + " (ties)"
                    out.append(NecessaryWitness(triple, sets, name, values))
                    break
    flag = bool(s.belief_dependent_tiebreak)
    applicable = s.action_only
    return NecessaryReport(bool(out) or flag or not applicable, out, flag, applicable)
