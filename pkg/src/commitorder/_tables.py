"""Vectorized exact evaluation of fixed S2 kernels over many S1 columns.

An S1 *column* is the vector ``c[b]`` of probabilities (scaled by ``N``) with
which each S1 block sends one given signal.  For a fixed S2 kernel the
utilities collected on that signal are exact integers after scaling by the
lcm of all denominators involved, so whole grids of columns are evaluated
at once in int64 (or Python ints when int64 could overflow).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import lcm

import numpy as np

_I64_SAFE = 2**62


def _den_lcm(vals):
    m = 1
    for v in vals:
        m = lcm(m, v.denominator)
    return m


@dataclass
class SlotTable:
    """Utilities of one S2 kernel at every column: ``s1/scale`` etc."""

    s1: np.ndarray
    s2: np.ndarray
    rec: np.ndarray
    scale: int  # s1, s2 and rec are all scaled by this


def column_grid(m: int, n: int) -> np.ndarray:
    """All vectors in ``{0..n}^m`` in mixed-radix order (index = sum c_b (n+1)^b)."""
    axes = [np.arange(n + 1, dtype=np.int64)] * m
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([a.reshape(-1, order="F") for a in mesh], axis=1)


def column_index(col, n: int) -> int:
    out, r = 0, 1
    for c in col:
        out += c * r
        r *= n + 1
    return out


def compositions(total: int, parts: int):
    """All tuples of ``parts`` non-negative ints summing to ``total``."""
    for bars in itertools.combinations(range(total + parts - 1), parts - 1):
        prev, out = -1, []
        for b in bars:
            out.append(b - prev - 1)
            prev = b
        out.append(total + parts - 2 - prev)
        yield tuple(out)


def slot_table(s, kernel: dict, cols: np.ndarray, n: int) -> SlotTable:
    """Evaluate S2 ``kernel`` (block2 -> {signal: Eps}) on every column.

    Signals are chosen by the receiver with the same lexicographic rule as
    :func:`commitorder.receiver.choose`; tilts only break ties.
    """
    signals = []
    for row in kernel.values():
        for w in row:
            if w not in signals:
                signals.append(w)
    states = range(s.n)
    kv = [[kernel.get(s.block_of2[t], {}).get(w) for w in signals] for t in states]
    entries = [e for r in kv for e in r if e is not None]
    dk = _den_lcm([e.value for e in entries] + [e.tilt for e in entries])
    dp = _den_lcm(s.p)
    du = _den_lcm([u for tab in (s.u1, s.u2) for r in tab for u in r])
    pint = [int(p * dp) for p in s.p]
    U1 = [[int(u * du) for u in r] for r in s.u1]
    U2 = [[int(u * du) for u in r] for r in s.u2]
    umax = max([abs(u) for r in U1 + U2 for u in r] + [du, 1])
    bound = max(pint + [1]) * dk * n * s.n * umax * max(len(signals), 1)
    dtype = np.int64 if bound < _I64_SAFE else object
    C = cols.astype(dtype)
    U1a = np.array(U1, dtype=dtype)
    U2a = np.array(U2, dtype=dtype)
    M = C.shape[0]
    s1 = np.zeros(M, dtype=dtype)
    s2 = np.zeros(M, dtype=dtype)
    rec = np.zeros(M, dtype=dtype)
    rows = np.arange(M)
    bpos = [s.blocks1.index(s.block_of1[t]) for t in states]
    for k in range(len(signals)):
        wv = np.zeros((M, s.n), dtype=dtype)
        wt = np.zeros((M, s.n), dtype=dtype)
        for t in states:
            e = kv[t][k]
            if not pint[t] or e is None:
                continue
            col = C[:, bpos[t]]
            if e.value:
                wv[:, t] = col * (pint[t] * int(e.value * dk))
            if e.tilt:
                wt[:, t] = col * (pint[t] * int(e.tilt * dk))
        a = _choose_many(wv, wt, U1a, U2a)
        s1 += (wv @ U1a)[rows, a]
        s2 += (wv @ U2a)[rows, a]
        rec += wv[rows, a] * du
    return SlotTable(s1, s2, rec, dp * dk * n * du)


def _masked_max(vals, mask):
    if vals.dtype == object:
        filled = np.where(mask, vals, None)
        out = np.array([max(v for v in r if v is not None) for r in filled], dtype=object)
        return out
    lo = np.iinfo(np.int64).min
    return np.where(mask, vals, lo).max(axis=1)


def _choose_many(wv, wt, U1, U2):
    """Row-wise receiver choice: weight, then its tilt, then S1, S2, index."""
    mask = np.ones(wv.shape, dtype=bool)
    for vals in (wv, wt):
        top = _masked_max(vals, mask)
        mask &= vals == top[:, None]
    for U in (U1, U2):
        ev, et = wv @ U, wt @ U
        for vals in (ev, et):
            top = _masked_max(vals, mask)
            mask &= vals == top[:, None]
    return mask.argmax(axis=1)
