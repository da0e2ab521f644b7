"""Posterior beliefs and the receiver's lexicographically tie-broken choice."""

from __future__ import annotations

from dataclasses import dataclass

from .numerics import ZERO, Eps, as_eps

__all__ = ["Belief", "UnreachableSignal", "posterior", "best_response", "joint_weights", "choose"]


class UnreachableSignal(ValueError):
    """The requested signal pair has zero probability."""


@dataclass(frozen=True)
class Belief:
    probabilities: dict  # state -> Eps

    def __getitem__(self, state):
        return self.probabilities.get(state, ZERO)

    def vector(self, s) -> list:
        return [as_eps(self.probabilities.get(t, ZERO)) for t in s.states]

    def total(self) -> Eps:
        out = ZERO
        for v in self.probabilities.values():
            out = out + v
        return out


def joint_weights(s, g1, g2, w1, w2) -> list:
    """Unnormalized P(state, w1, w2) for every state, in state order."""
    out = []
    for i, t in enumerate(s.states):
        q = s.p[i]
        if q == 0:
            out.append(ZERO)
            continue
        a = g1.prob(s.block_of1[i], w1)
        if not a:
            out.append(ZERO)
            continue
        b = g2.prob(s.block_of2[i], w1, w2)
        out.append(a * b * q)
    return out


def _normalized(weights):
    total = ZERO
    for w in weights:
        total = total + w
    if not total:
        raise UnreachableSignal("unreachable signal pair")
    return [w / total for w in weights]


def posterior(s, g1, g2, w1, w2) -> Belief:
    probs = _normalized(joint_weights(s, g1, g2, w1, w2))
    return Belief(dict(zip(s.states, probs)))


def choose(s, weights) -> int:
    """Index of the receiver's action given (possibly unnormalized) state weights.

    Highest weight first, then sender 1's expected utility, then sender 2's,
    then state order.  Scaling all weights by a positive constant changes
    nothing, so joint probabilities can be passed directly.
    """
    n = s.n
    top = None
    cands = []
    for a in range(n):
        w = weights[a]
        if top is None or w > top:
            top, cands = w, [a]
        elif w == top:
            cands.append(a)
    if len(cands) == 1:
        return cands[0]
    for table in (s.u1, s.u2):
        best = None
        keep = []
        for a in cands:
            v = ZERO
            for t in range(n):
                wt = weights[t]
                if wt:
                    u = table[t][a]
                    if u:
                        v = v + wt * u
            if best is None or v > best:
                best, keep = v, [a]
            elif v == best:
                keep.append(a)
        cands = keep
        if len(cands) == 1:
            break
    return cands[0]


def best_response(s, b: Belief) -> str:
    return s.states[choose(s, b.vector(s))]
