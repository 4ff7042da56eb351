# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled pricing kernels for the L1 simplex; see ``_pricing_py`` for the reference."""

import numpy as np

from libc.math cimport fabs


def column_dots(const int[:, ::1] rows, const double[:, ::1] vals, const double[::1] y):
    cdef Py_ssize_t n = rows.shape[0], k = rows.shape[1], j, e
    cdef double acc
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] d = out
    for j in range(n):
        acc = 0.0
        for e in range(k):
            acc += vals[j, e] * y[rows[j, e]]
        d[j] = acc
    return out


def price_dantzig(const int[:, ::1] rows, const double[:, ::1] vals, const double[::1] y):
    cdef Py_ssize_t n = rows.shape[0], k = rows.shape[1], j, e, best = 0
    cdef double acc, best_abs = -1.0, best_val = 0.0
    for j in range(n):
        acc = 0.0
        for e in range(k):
            acc += vals[j, e] * y[rows[j, e]]
        if fabs(acc) > best_abs:
            best_abs = fabs(acc)
            best_val = acc
            best = j
    return int(best), best_val


def price_bland(const int[:, ::1] rows, const double[:, ::1] vals, const double[::1] y, double threshold):
    cdef Py_ssize_t n = rows.shape[0], k = rows.shape[1], j, e
    cdef double acc
    for j in range(n):
        acc = 0.0
        for e in range(k):
            acc += vals[j, e] * y[rows[j, e]]
        if fabs(acc) > threshold:
            return int(j), acc
    return -1, 0.0


def max_abs_dot(const int[:, ::1] rows, const double[:, ::1] vals, const double[::1] y):
    cdef Py_ssize_t n = rows.shape[0], k = rows.shape[1], j, e
    cdef double acc, best = 0.0
    for j in range(n):
        acc = 0.0
        for e in range(k):
            acc += vals[j, e] * y[rows[j, e]]
        if fabs(acc) > best:
            best = fabs(acc)
    return best
