"""Pure-Python kernels: the fallback backend.

Twin of ``_kernels.pyx``.  Same functions, same argument conventions,
same arithmetic order, so the two backends agree to rounding.  These are
plain loops; the compiled backend exists because orbit/cocycle sweeps run
for 1e6-1e7 steps per energy across whole grids.

Sampling functions arrive encoded as ``(kind, par_a, par_b)``:

* kind 0: constant,            par_a = [c]
* kind 1: scaled cosine,       par_a = [lam]           -> lam*cos(2*pi*x)
* kind 2: trig polynomial,     par_a = [a0..am], par_b = [b1..bm]
* kind 3: piecewise linear,    par_a = nodes x0..xm (x0=0, xm=1),
                               par_b = values at the nodes
* kind 4: step function,       par_a = cuts x0..xm (x0=0, xm=1),
                               par_b = values on the m pieces
"""

from __future__ import annotations

import math

import numpy as np

BACKEND = "python"


def _interval_index(lefts, w: float) -> int:
    lo, hi = 0, len(lefts)
    while hi - lo > 1:
        mid = (lo + hi) >> 1
        if lefts[mid] <= w:
            lo = mid
        else:
            hi = mid
    return lo


def eval_sampler(kind: int, par_a, par_b, x: float) -> float:
    if kind == 0:
        return par_a[0]
    if kind == 1:
        return par_a[0] * math.cos(2.0 * math.pi * x)
    if kind == 2:
        acc = par_a[0]
        for m in range(1, len(par_a)):
            ang = 2.0 * math.pi * m * x
            acc += par_a[m] * math.cos(ang)
            if m - 1 < len(par_b):
                acc += par_b[m - 1] * math.sin(ang)
        return acc
    if kind == 3:
        i = _interval_index(par_a, x)
        x0 = par_a[i]
        x1 = par_a[i + 1]
        y0 = par_b[i]
        y1 = par_b[i + 1]
        return y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    if kind == 4:
        i = _interval_index(par_a, x)
        return par_b[i]
    raise ValueError(f"unknown sampler kind {kind}")


def orbit_fill(lefts, offsets, w0: float, out) -> float:
    """out[i] = T^i(w0); returns T^n(w0) for n = len(out)."""
    w = w0
    n = len(out)
    for i in range(n):
        out[i] = w
        w = w + offsets[_interval_index(lefts, w)]
    return w


def potential_fill(lefts, offsets, kind, par_a, par_b, w0: float, out) -> float:
    """out[i] = f(T^i(w0)); returns T^n(w0) for n = len(out)."""
    w = w0
    n = len(out)
    for i in range(n):
        out[i] = eval_sampler(kind, par_a, par_b, w)
        w = w + offsets[_interval_index(lefts, w)]
    return w


def cocycle_accumulate(
    lefts, offsets, kind, par_a, par_b, w0: float, energy: float, n: int
):
    """n-step transfer-matrix product along the orbit of w0.

    Left-multiplies [[E - f(w), -1], [1, 0]] step by step, rescaling by
    the max-abs entry every 16 steps.  Returns
    (log_norm, m00, m01, m10, m11, w_final) where the represented product
    is exp(log_norm) times the returned matrix.
    """
    a, b = 1.0, 0.0
    c, d = 0.0, 1.0
    log_norm = 0.0
    w = w0
    for i in range(n):
        e = energy - eval_sampler(kind, par_a, par_b, w)
        a, b, c, d = e * a - c, e * b - d, a, b
        w = w + offsets[_interval_index(lefts, w)]
        if (i & 15) == 15:
            s = max(abs(a), abs(b), abs(c), abs(d))
            if s > 0.0:
                a /= s
                b /= s
                c /= s
                d /= s
                log_norm += math.log(s)
    return log_norm, a, b, c, d, w


def sturm_counts(diag, probes):
    """Eigenvalue counts below each probe for tridiag(1, diag, 1).

    One guarded LDL^T pivot sweep per probe; the count of negative pivots
    equals the count of eigenvalues below the probe.  Vectorized across
    probes, sequential in the matrix dimension.
    """
    d = np.asarray(diag, dtype=np.float64)
    x = np.asarray(probes, dtype=np.float64)
    tiny = 1e-300
    # a (near-)zero pivot counts as negative: keeps the count monotone in x
    q = d[0] - x
    q = np.where(np.abs(q) < tiny, -tiny, q)
    counts = (q < 0.0).astype(np.int64)
    for i in range(1, len(d)):
        q = (d[i] - x) - 1.0 / q
        q = np.where(np.abs(q) < tiny, -tiny, q)
        counts += q < 0.0
    return counts
