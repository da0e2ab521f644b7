# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled kernels; signatures and results match ``_pycore``."""

from math import gcd

import numpy as np

cimport numpy as cnp

cnp.import_array()


cpdef list normalize(list row):
    cdef object g = 0
    cdef object v
    for v in row:
        if v:
            g = gcd(g, v)
            if g == 1:
                return row
    if g > 1:
        return [v // g for v in row]
    return row


def pivot(list rows, list obj, Py_ssize_t r, Py_ssize_t c):
    cdef list pr = rows[r]
    cdef list row, tab
    cdef object pv, f
    cdef Py_ssize_t i, k, width
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


def bland_step(list rows, list basis, list objrow, Py_ssize_t ncols, allowed):
    cdef Py_ssize_t c = -1, k, i, best = -1
    cdef object a, num, best_num = 0, best_den = 0, lhs, rhs
    cdef list row
    for k in range(ncols):
        if allowed[k] and objrow[k] > 0:
            c = k
            break
    if c < 0:
        return None
    for i in range(len(rows)):
        row = rows[i]
        a = row[c]
        if a > 0:
            num = row[len(row) - 1]
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


cdef inline Py_ssize_t _count_le(const double[:] cdf, double x) nogil:
    cdef Py_ssize_t k = 0, n = cdf.shape[0]
    while k < n and cdf[k] <= x:
        k += 1
    return k


def tally(const double[:, :] u, const double[:] prior_cdf, const double[:, :] g1_cdf,
          const double[:, :, :] g2_cdf, const cnp.int64_t[:] block1, const cnp.int64_t[:] block2,
          action, Py_ssize_t n_states, Py_ssize_t n_w1, Py_ssize_t n_w2):
    counts_arr = np.zeros((n_states, n_w1, n_w2), dtype=np.int64)
    cdef cnp.int64_t[:, :, :] counts = counts_arr
    cdef Py_ssize_t i, theta, w1, w2, n = u.shape[0]
    with nogil:
        for i in range(n):
            theta = _count_le(prior_cdf, u[i, 0])
            if theta > n_states - 1:
                theta = n_states - 1
            w1 = _count_le(g1_cdf[block1[theta]], u[i, 1])
            if w1 > n_w1 - 1:
                w1 = n_w1 - 1
            w2 = _count_le(g2_cdf[block2[theta], w1], u[i, 2])
            if w2 > n_w2 - 1:
                w2 = n_w2 - 1
            counts[theta, w1, w2] += 1
    return counts_arr
