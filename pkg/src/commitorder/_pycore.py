"""Pure-Python kernels.  ``_core.pyx`` mirrors these signatures."""

from __future__ import annotations

from math import gcd

import numpy as np


def normalize(row):
    g = 0
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def pivot(rows, obj, r, c):
    """Pivot the integer tableau on ``(r, c)`` in place.

    ``rows`` are constraint rows and ``obj`` a list of objective rows sharing
    the column layout.  The pivot row is made positive at ``c`` so every row
    keeps a positive scale.
    """
    pr = rows[r]
    if pr[c] < 0:
        pr = [-v for v in pr]
    pr = normalize(pr)
    pv = pr[c]
    rows[r] = pr
    width = len(pr)
    for tab in (rows, obj):
        for i in range(len(tab)):
            if tab is rows and i == r:
                continue
            row = tab[i]
            f = row[c]
            if not f:
                continue
            tab[i] = normalize([row[k] * pv - f * pr[k] for k in range(width)])


def bland_step(rows, basis, objrow, ncols, allowed):
    """Entering/leaving choice under Bland's rule for a maximization tableau.

    Returns ``None`` at optimality, ``(-1, c)`` if column ``c`` is unbounded,
    else ``(r, c)``.
    """
    c = -1
    for k in range(ncols):
        if allowed[k] and objrow[k] > 0:
            c = k
            break
    if c < 0:
        return None
    best = -1
    best_num = best_den = 0
    for i, row in enumerate(rows):
        a = row[c]
        if a > 0:
            num = row[-1]
            if best < 0:
                best, best_num, best_den = i, num, a
            else:
                lhs = num * best_den
                rhs = best_num * a
                if lhs < rhs or (lhs == rhs and basis[i] < basis[best]):
                    best, best_num, best_den = i, num, a
    if best < 0:
        return (-1, c)
    return (best, c)


def tally(u, prior_cdf, g1_cdf, g2_cdf, block1, block2, action, n_states, n_w1, n_w2):
    """Sample episodes from uniforms ``u`` (shape ``(n, 3)``) and count outcomes.

    Returns an ``int64`` array ``counts[state, w1, w2]``.
    """
    theta = np.searchsorted(prior_cdf, u[:, 0], side="right")
    theta = np.minimum(theta, n_states - 1)
    b1 = block1[theta]
    rows1 = g1_cdf[b1]
    w1 = (rows1 <= u[:, 1:2]).sum(axis=1)
    w1 = np.minimum(w1, n_w1 - 1)
    b2 = block2[theta]
    rows2 = g2_cdf[b2, w1]
    w2 = (rows2 <= u[:, 2:3]).sum(axis=1)
    w2 = np.minimum(w2, n_w2 - 1)
    flat = (theta * n_w1 + w1) * n_w2 + w2
    counts = np.bincount(flat, minlength=n_states * n_w1 * n_w2)
    return counts.reshape(n_states, n_w1, n_w2).astype(np.int64)
