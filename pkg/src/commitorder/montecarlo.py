"""Sampling oracle for expected utilities.

Episode ``i`` draws its three uniforms (state, S1 signal, S2 signal) from
Philox counter ``i`` under key ``seed``, so estimates are identical for any
shard size or thread count.  Shards return integer outcome counts; the
statistics are computed exactly from the summed counts.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import _backend
from .equilibrium import outcomes
from .numerics import eps_limit

__all__ = ["SimEstimate", "simulate", "episode_uniforms"]

SHARD = 1 << 17
_WORDS = 4  # Philox4x64 yields four words per counter step; one step per episode


@dataclass(frozen=True)
class SimEstimate:
    mean: tuple  # (s1, s2, receiver) as floats
    std_error: tuple
    samples: int
    seed: int

    def within(self, exact, k: float = 3.0) -> bool:
        """Whether every mean lies within ``k`` standard errors of ``exact``."""
        return all(abs(m - float(e)) <= k * se for m, e, se in zip(self.mean, exact, self.std_error))

    def to_dict(self):
        keys = ("s1", "s2", "receiver")
        return {
            "mean": dict(zip(keys, self.mean)),
            "std_error": dict(zip(keys, self.std_error)),
            "samples": self.samples,
            "seed": self.seed,
        }


def episode_uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Uniforms in [0, 1) for episodes ``start .. start+count-1``, shape ``(count, 3)``."""
    bg = np.random.Philox(key=seed)
    if start:
        bg.advance(start)
    raw = bg.random_raw(count * _WORDS).reshape(count, _WORDS)[:, :3]
    return (raw >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))


def _cdf(probs) -> np.ndarray:
    """Cumulative row; entries from the last positive one on never bound a draw."""
    p = np.array([float(x) for x in probs], dtype=np.float64)
    c = np.cumsum(p)
    pos = np.flatnonzero(p > 0)
    if pos.size:
        c[pos[-1] :] = np.inf
    else:
        c[:] = np.inf
    return c


def _tables(s, g1, g2):
    w1s, w2s = list(g1.signals), list(g2.signals)
    prior = _cdf(s.p)
    g1c = np.stack([_cdf([eps_limit(g1.prob(b, w)) for w in w1s]) for b in s.blocks1])
    g2c = np.stack(
        [
            np.stack([_cdf([eps_limit(g2.prob(b, w1, w)) for w in w2s]) for w1 in w1s])
            for b in s.blocks2
        ]
    )
    b1 = np.array([s.blocks1.index(b) for b in s.block_of1], dtype=np.int64)
    b2 = np.array([s.blocks2.index(b) for b in s.block_of2], dtype=np.int64)
    action = np.full((len(w1s), len(w2s)), -1, dtype=np.int64)
    for o in outcomes(s, g1, g2):
        action[w1s.index(o.w1), w2s.index(o.w2)] = o.action
    return prior, g1c, g2c, b1, b2, action


def simulate(s, g1, g2, n: int, seed: int, threads: int = 1) -> SimEstimate:
    """Estimate (S1, S2, receiver) expected utilities from ``n`` episodes.

    Tilts are resolved to their limits for sampling; the receiver's action on
    each signal pair is the one chosen on the exact tilted posterior.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    prior, g1c, g2c, b1, b2, action = _tables(s, g1, g2)
    nw1, nw2 = action.shape

    def shard(start):
        u = episode_uniforms(seed, start, min(SHARD, n - start))
        return _backend.tally(u, prior, g1c, g2c, b1, b2, action, s.n, nw1, nw2)

    starts = range(0, n, SHARD)
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            parts = list(pool.map(shard, starts))
    else:
        parts = [shard(i) for i in starts]
    counts = sum(parts[1:], parts[0])

    means, errs = [], []
    for table in (s.u1, s.u2, None):
        tot = Fraction(0)
        sq = Fraction(0)
        for t, i, j in zip(*np.nonzero(counts)):
            a = int(action[i, j])
            if a < 0:
                raise RuntimeError("sampled a signal pair with zero limit probability")
            u = (Fraction(int(t == a)) if table is None else table[t][a])
            c = int(counts[t, i, j])
            tot += c * u
            sq += c * u * u
        mean = tot / n
        var = (sq - n * mean * mean) / (n - 1) if n > 1 else Fraction(0)
        means.append(float(mean))
        errs.append(math.sqrt(var / n))
    return SimEstimate(tuple(means), tuple(errs), n, seed)
