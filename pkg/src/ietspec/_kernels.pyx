# cython: boundscheck=False, wraparound=False, cdivision=True, language_level=3
"""Compiled kernels: orbit stepping, cocycle products, Sturm counts.

Twin of ``_kernels_py``; see that module for the sampler encoding.  Keep
the arithmetic order identical between the two backends.
"""

from libc.math cimport cos, sin, log, fabs, M_PI

BACKEND = "cython"


cdef inline Py_ssize_t _interval_index(const double[::1] lefts, double w) nogil:
    cdef Py_ssize_t lo = 0
    cdef Py_ssize_t hi = lefts.shape[0]
    cdef Py_ssize_t mid
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if lefts[mid] <= w:
            lo = mid
        else:
            hi = mid
    return lo


cdef inline double _eval_sampler(
    int kind, const double[::1] par_a, const double[::1] par_b, double x
) nogil:
    cdef double acc, ang, x0, x1
    cdef Py_ssize_t i, m
    if kind == 0:
        return par_a[0]
    if kind == 1:
        return par_a[0] * cos(2.0 * M_PI * x)
    if kind == 2:
        acc = par_a[0]
        for m in range(1, par_a.shape[0]):
            ang = 2.0 * M_PI * m * x
            acc += par_a[m] * cos(ang)
            if m - 1 < par_b.shape[0]:
                acc += par_b[m - 1] * sin(ang)
        return acc
    if kind == 3:
        i = _interval_index(par_a, x)
        x0 = par_a[i]
        x1 = par_a[i + 1]
        return par_b[i] + (par_b[i + 1] - par_b[i]) * (x - x0) / (x1 - x0)
    # kind == 4
    i = _interval_index(par_a, x)
    return par_b[i]


def eval_sampler(int kind, const double[::1] par_a, const double[::1] par_b, double x):
    if kind < 0 or kind > 4:
        raise ValueError(f"unknown sampler kind {kind}")
    return _eval_sampler(kind, par_a, par_b, x)


def orbit_fill(
    const double[::1] lefts,
    const double[::1] offsets,
    double w0,
    double[::1] out,
):
    """out[i] = T^i(w0); returns T^n(w0) for n = len(out)."""
    cdef double w = w0
    cdef Py_ssize_t i, n = out.shape[0]
    with nogil:
        for i in range(n):
            out[i] = w
            w = w + offsets[_interval_index(lefts, w)]
    return w


def potential_fill(
    const double[::1] lefts,
    const double[::1] offsets,
    int kind,
    const double[::1] par_a,
    const double[::1] par_b,
    double w0,
    double[::1] out,
):
    """out[i] = f(T^i(w0)); returns T^n(w0) for n = len(out)."""
    cdef double w = w0
    cdef Py_ssize_t i, n = out.shape[0]
    with nogil:
        for i in range(n):
            out[i] = _eval_sampler(kind, par_a, par_b, w)
            w = w + offsets[_interval_index(lefts, w)]
    return w


def cocycle_accumulate(
    const double[::1] lefts,
    const double[::1] offsets,
    int kind,
    const double[::1] par_a,
    const double[::1] par_b,
    double w0,
    double energy,
    long n,
):
    """n-step transfer-matrix product along the orbit of w0.

    Left-multiplies [[E - f(w), -1], [1, 0]] step by step, rescaling by
    the max-abs entry every 16 steps.  Returns
    (log_norm, m00, m01, m10, m11, w_final).
    """
    cdef double a = 1.0, b = 0.0, c = 0.0, d = 1.0
    cdef double log_norm = 0.0
    cdef double w = w0, e, s, ta, tb
    cdef long i
    with nogil:
        for i in range(n):
            e = energy - _eval_sampler(kind, par_a, par_b, w)
            ta = e * a - c
            tb = e * b - d
            c = a
            d = b
            a = ta
            b = tb
            w = w + offsets[_interval_index(lefts, w)]
            if (i & 15) == 15:
                s = fabs(a)
                if fabs(b) > s:
                    s = fabs(b)
                if fabs(c) > s:
                    s = fabs(c)
                if fabs(d) > s:
                    s = fabs(d)
                if s > 0.0:
                    a /= s
                    b /= s
                    c /= s
                    d /= s
                    log_norm += log(s)
    return log_norm, a, b, c, d, w


def sturm_counts(const double[::1] diag, const double[::1] probes):
    """Eigenvalue counts below each probe for tridiag(1, diag, 1)."""
    import numpy as np

    cdef Py_ssize_t np_ = probes.shape[0]
    cdef Py_ssize_t m = diag.shape[0]
    counts_arr = np.zeros(np_, dtype=np.int64)
    cdef long[::1] counts = counts_arr
    cdef double q, x
    cdef double tiny = 1e-300
    cdef Py_ssize_t i, j
    with nogil:
        for j in range(np_):
            x = probes[j]
            # a (near-)zero pivot counts as negative: keeps the count
            # monotone in x
            q = diag[0] - x
            if fabs(q) < tiny:
                q = -tiny
            if q < 0.0:
                counts[j] += 1
            for i in range(1, m):
                q = (diag[i] - x) - 1.0 / q
                if fabs(q) < tiny:
                    q = -tiny
                if q < 0.0:
                    counts[j] += 1
    return counts_arr
