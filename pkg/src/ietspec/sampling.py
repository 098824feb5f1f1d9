"""Sampling functions and the discontinuity scans they feed.

A sampling function f maps [0,1) to the reals and generates potentials
V(n) = f(T^n w) along exchange orbits.  The spectral criteria consume two
kinds of information about f: declared regularity metadata (Lipschitz
constant, level-set bound, a non-degenerate extremum) and the behaviour of
the compositions f o T^n at the discontinuities of T^n.  The scans in this
module locate a discontinuous composition and certify it with one-sided
limits, which is the numerical shadow of the empty-AC-spectrum criteria.
"""

from __future__ import annotations

import json
import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import kernels
from .iet import (
    Iet,
    apply_map,
    discontinuities_of_power,
    left_limit_power,
    orbit,
)

__all__ = [
    "SamplingFunction",
    "FunctionMetadata",
    "Extremum",
    "constant",
    "cosine",
    "trig_polynomial",
    "piecewise_linear",
    "step_function",
    "power_gap",
    "numeric_power_gap",
    "PowerGapWitness",
    "scan_discontinuous_power",
    "PairWitnessReport",
    "pair_witness",
    "lipschitz_propagation",
    "ExtremumModulus",
    "nondegenerate_extremum_check",
    "function_to_json_dict",
    "function_from_json_dict",
]

SPOT_GRID = 10_000
CONSTANT_SPREAD_TOL = 1e-9


@dataclass(frozen=True)
class Extremum:
    """Location of a global extremum, with its orientation."""

    location: float
    is_minimum: bool = False


@dataclass(frozen=True)
class FunctionMetadata:
    """Declared regularity data, spot-verified at construction.

    ``level_set_bound`` bounds the cardinality of every level set
    f^{-1}({x}).  ``extremum`` marks a claimed non-degenerate global
    extremum.  Declarations are checked on a coarse grid; they remain
    declarations, not proofs.
    """

    lipschitz_constant: Optional[float] = None
    level_set_bound: Optional[int] = None
    extremum: Optional[Extremum] = None
    is_constant: bool = False

    # kept for the classification report, which speaks of a maximum
    @property
    def nondegenerate_extremum(self) -> Optional[Extremum]:
        return self.extremum


@dataclass(frozen=True, eq=False)
class SamplingFunction:
    """Evaluable f: [0,1) -> R with one-sided limits and metadata.

    ``kernel_kind``/``par_a``/``par_b`` is the flat encoding the orbit
    kernels consume; see :mod:`ietspec._kernels_py`.
    """

    kind: str
    kernel_kind: int
    par_a: np.ndarray
    par_b: np.ndarray
    circle_continuous: bool
    line_continuous: bool
    metadata: FunctionMetadata

    def __call__(self, x: float) -> float:
        if not 0.0 <= x < 1.0:
            raise ValueError(f"point {x} outside [0,1)")
        return float(kernels.eval_sampler(self.kernel_kind, self.par_a, self.par_b, x))

    def eval_left_limit(self, y: float) -> float:
        """lim_{x -> y from below} f(x), for y in (0,1]."""
        if not 0.0 < y <= 1.0:
            raise ValueError(f"point {y} outside (0,1]")
        if self.kind in ("constant", "cosine", "trig_poly"):
            # smooth formulas extend to [0,1]; evaluating at y gives the limit
            return float(
                kernels.eval_sampler(self.kernel_kind, self.par_a, self.par_b, min(y, 1.0))
                if y < 1.0
                else _formula_at_one(self)
            )
        if self.kind == "piecewise_linear":
            xs, ys = self.par_a, self.par_b
            i = bisect_left(list(xs), y) - 1
            i = max(i, 0)
            x0, x1 = xs[i], xs[i + 1]
            return float(ys[i] + (ys[i + 1] - ys[i]) * (y - x0) / (x1 - x0))
        # step: the piece whose closure contains y from the left
        xs, ys = self.par_a, self.par_b
        i = bisect_left(list(xs), y) - 1
        i = max(i, 0)
        return float(ys[min(i, len(ys) - 1)])

    def grid_values(self, m: int = SPOT_GRID) -> np.ndarray:
        xs = np.arange(m) / m
        return np.array([kernels.eval_sampler(self.kernel_kind, self.par_a, self.par_b, x) for x in xs])

    def sup_abs(self) -> float:
        """Upper bound for |f| (exact for the closed-form kinds)."""
        if self.kind == "constant":
            return abs(float(self.par_a[0]))
        if self.kind == "cosine":
            return abs(float(self.par_a[0]))
        if self.kind == "trig_poly":
            return float(np.sum(np.abs(self.par_a)) + np.sum(np.abs(self.par_b)))
        return float(np.max(np.abs(self.par_b)))


def _formula_at_one(f: SamplingFunction) -> float:
    if f.kind == "constant":
        return float(f.par_a[0])
    if f.kind == "cosine":
        return float(f.par_a[0])  # cos(2*pi) = 1
    acc = float(f.par_a[0])
    for m in range(1, len(f.par_a)):
        acc += float(f.par_a[m])  # cos(2*pi*m) = 1, sin(2*pi*m) = 0
    return acc


def _spot_verify(f: SamplingFunction) -> None:
    meta = f.metadata
    vals = f.grid_values()
    spread = float(vals.max() - vals.min())
    if meta.is_constant and spread > CONSTANT_SPREAD_TOL:
        raise ValueError(f"declared constant but grid spread is {spread:.3g}")
    if not meta.is_constant and spread <= CONSTANT_SPREAD_TOL and f.kind != "constant":
        raise ValueError("declared non-constant but the grid cannot distinguish it from a constant")
    if meta.lipschitz_constant is not None:
        k = meta.lipschitz_constant
        h = 1.0 / SPOT_GRID
        jumps = np.abs(np.diff(vals))
        worst = float(jumps.max()) / h if len(jumps) else 0.0
        if worst > k * (1.0 + 1e-6) + 1e-12:
            raise ValueError(
                f"declared Lipschitz constant {k} violated on the grid (ratio {worst:.6g})"
            )
    if meta.level_set_bound is not None:
        bound = meta.level_set_bound
        lo, hi = float(vals.min()), float(vals.max())
        if hi - lo > CONSTANT_SPREAD_TOL:
            for level in np.linspace(lo + 1e-3 * (hi - lo), hi - 1e-3 * (hi - lo), 37):
                signs = np.sign(vals - level)
                crossings = int(np.sum(signs[1:] * signs[:-1] < 0))
                if crossings > bound:
                    raise ValueError(
                        f"declared level-set bound {bound} violated: level "
                        f"{level:.6g} is crossed {crossings} times on the grid"
                    )


def _build(
    kind: str,
    kernel_kind: int,
    par_a: Sequence[float],
    par_b: Sequence[float],
    circle_continuous: bool,
    line_continuous: bool,
    metadata: FunctionMetadata,
) -> SamplingFunction:
    f = SamplingFunction(
        kind=kind,
        kernel_kind=kernel_kind,
        par_a=np.asarray(par_a, dtype=np.float64),
        par_b=np.asarray(par_b, dtype=np.float64),
        circle_continuous=circle_continuous,
        line_continuous=line_continuous,
        metadata=metadata,
    )
    _spot_verify(f)
    return f


def constant(c: float) -> SamplingFunction:
    meta = FunctionMetadata(lipschitz_constant=0.0, is_constant=True)
    return _build("constant", 0, [c], [], True, True, meta)


def cosine(lam: float, metadata: Optional[FunctionMetadata] = None) -> SamplingFunction:
    """lam * cos(2*pi*x); the workhorse sampling function."""
    if metadata is None:
        if lam == 0.0:
            return constant(0.0)
        metadata = FunctionMetadata(
            lipschitz_constant=2.0 * math.pi * abs(lam),
            level_set_bound=2,
            extremum=Extremum(location=0.0 if lam > 0 else 0.5, is_minimum=False),
            is_constant=False,
        )
    return _build("cosine", 1, [lam], [], True, True, metadata)


def trig_polynomial(
    cos_coeffs: Sequence[float],
    sin_coeffs: Sequence[float] = (),
    metadata: Optional[FunctionMetadata] = None,
) -> SamplingFunction:
    """a0 + sum a_m cos(2 pi m x) + b_m sin(2 pi m x).

    ``cos_coeffs`` is [a0, a1, ..]; ``sin_coeffs`` is [b1, ..].
    """
    a = list(cos_coeffs)
    b = list(sin_coeffs)
    if len(b) > len(a) - 1:
        raise ValueError("more sine than cosine harmonics")
    degree = max(len(a) - 1, len(b))
    if metadata is None:
        lip = sum(
            2.0 * math.pi * m * (abs(a[m]) if m < len(a) else 0.0)
            + 2.0 * math.pi * m * (abs(b[m - 1]) if m - 1 < len(b) else 0.0)
            for m in range(1, degree + 1)
        )
        spread_possible = any(x != 0.0 for x in a[1:]) or any(x != 0.0 for x in b)
        if not spread_possible:
            return constant(a[0] if a else 0.0)
        vals = [
            kernels.eval_sampler(2, np.asarray(a, float), np.asarray(b, float), x)
            for x in np.arange(SPOT_GRID) / SPOT_GRID
        ]
        loc = float(np.argmax(vals)) / SPOT_GRID
        metadata = FunctionMetadata(
            lipschitz_constant=lip,
            level_set_bound=2 * degree,
            extremum=Extremum(location=loc, is_minimum=False),
            is_constant=False,
        )
    return _build("trig_poly", 2, a, b, True, True, metadata)


def piecewise_linear(
    xs: Sequence[float], ys: Sequence[float], metadata: Optional[FunctionMetadata] = None
) -> SamplingFunction:
    """Node table: f interpolates (xs[i], ys[i]); xs must start 0, end 1."""
    xs = list(map(float, xs))
    ys = list(map(float, ys))
    if len(xs) != len(ys) or len(xs) < 2:
        raise ValueError("need matching node tables with at least two nodes")
    if xs[0] != 0.0 or xs[-1] != 1.0 or any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("nodes must increase strictly from 0 to 1")
    if metadata is None:
        slopes = [
            abs(y1 - y0) / (x1 - x0)
            for (x0, x1, y0, y1) in zip(xs, xs[1:], ys, ys[1:])
        ]
        monotone_pieces = _monotone_run_count(ys)
        spread = max(ys) - min(ys)
        metadata = FunctionMetadata(
            lipschitz_constant=max(slopes),
            level_set_bound=monotone_pieces if spread > CONSTANT_SPREAD_TOL else None,
            is_constant=spread <= CONSTANT_SPREAD_TOL,
        )
    return _build(
        "piecewise_linear", 3, xs, ys, circle_continuous=(ys[0] == ys[-1]),
        line_continuous=True, metadata=metadata,
    )


def step_function(
    xs: Sequence[float], ys: Sequence[float], metadata: Optional[FunctionMetadata] = None
) -> SamplingFunction:
    """Right-continuous step table: f = ys[i] on [xs[i], xs[i+1])."""
    xs = list(map(float, xs))
    ys = list(map(float, ys))
    if len(xs) != len(ys) + 1:
        raise ValueError("need one more cut than piece values")
    if xs[0] != 0.0 or xs[-1] != 1.0 or any(b <= a for a, b in zip(xs, xs[1:])):
        raise ValueError("cuts must increase strictly from 0 to 1")
    spread = max(ys) - min(ys)
    if metadata is None:
        metadata = FunctionMetadata(is_constant=spread <= CONSTANT_SPREAD_TOL)
    return _build(
        "step", 4, xs, ys,
        circle_continuous=(len(ys) == 1),
        line_continuous=(len(ys) == 1),
        metadata=metadata,
    )


def _monotone_run_count(ys: Sequence[float]) -> int:
    runs = 1
    direction = 0
    for a, b in zip(ys, ys[1:]):
        d = (b > a) - (b < a)
        if d == 0:
            continue
        if direction != 0 and d != direction:
            runs += 1
        direction = d
    return runs


# ---------------------------------------------------------------------------
# discontinuity scans


def power_gap(t: Iet, f: SamplingFunction, n: int, wd) -> float:
    """Jump of f o T^n at wd: |left limit - right value|.

    The right value is plain forward iteration (T is right-continuous);
    the left limit composes the symbolic left-branch power with f's own
    left limit, which matters when the orbit limit lands on 1.
    """
    wdf = float(wd)
    if not 0.0 < wdf < 1.0:
        raise ValueError(f"discontinuity candidate {wd} outside (0,1)")
    tf = t.as_float()
    left_point = float(left_limit_power(tf, wdf, n))
    left_val = f.eval_left_limit(left_point)
    right_val = f(float(orbit(tf, wdf, n, n)[0]))
    return abs(left_val - right_val)


@dataclass(frozen=True)
class PowerGapWitness:
    n: int
    wd: float
    gap: float


def numeric_power_gap(t: Iet, f: SamplingFunction, n: int, wd: float, h: float = 1e-9) -> float:
    """Two-sided numeric estimate of the jump: |f(T^n(wd-h)) - f(T^n(wd+h))|.

    Independent of the symbolic left-branch recursion; used to re-verify
    scan witnesses.
    """
    tf = t.as_float()
    lo = float(orbit(tf, wd - h, n, n)[0])
    hi = float(orbit(tf, wd + h, n, n)[0])
    return abs(f(lo) - f(hi))


def scan_discontinuous_power(
    t: Iet, f: SamplingFunction, n_max: int, tau: float = 1e-6
) -> Optional[PowerGapWitness]:
    """First (n, wd) in lexicographic order with a gap above tau.

    Scans wd over the candidate discontinuities of T^n for n = 1..n_max.
    Returning None does not prove all compositions continuous; it only
    reports that the scan found nothing above the threshold.
    """
    if n_max < 1:
        raise ValueError("n_max must be >= 1")
    tf = t.as_float()
    for n in range(1, n_max + 1):
        for wd in discontinuities_of_power(tf, n):
            wdf = float(wd)
            if not 0.0 < wdf < 1.0:
                continue
            gap = power_gap(tf, f, n, wdf)
            if gap > tau:
                return PowerGapWitness(n=n, wd=wdf, gap=gap)
    return None


@dataclass(frozen=True)
class PairWitnessReport:
    """Two-sided pair diagnostic at a discontinuity of a composed power.

    Pairs straddling wd at distances 1/k must show a persistent forward
    gap at step n (the jump survives) while their entire backward windows
    collapse (no jump in the past).  That asymmetry is the mechanism that
    rules out absolutely continuous spectrum.
    """

    n: int
    wd: float
    depth: int
    ks: tuple[int, ...]
    expected_gap: float
    forward_gaps: tuple[float, ...]
    backward_sups: tuple[float, ...]
    forward_converges: bool
    backward_shrinks: bool
    verdict: bool


def pair_witness(
    t: Iet,
    f: SamplingFunction,
    n: int,
    wd: float,
    depth: int,
    ks: Sequence[int],
) -> PairWitnessReport:
    """Evaluate the straddling-pair diagnostic at wd.

    Requires wd to stay clear of the backward discontinuities up to
    ``depth``; otherwise some T^{-m} jumps at wd and the backward window
    cannot collapse, so the input is rejected with the offending step.
    """
    tf = t.as_float()
    wdf = float(wd)
    if not 0.0 < wdf < 1.0:
        raise ValueError(f"discontinuity candidate {wd} outside (0,1)")
    if depth >= 1:
        level = [float(x) for x in tf.image_lefts[1:]]
        for m in range(1, depth + 1):
            if any(abs(x - wdf) < 1e-12 for x in level):
                raise ValueError(
                    f"wd={wdf} lies on a discontinuity of the inverse power m={m}; "
                    "pair diagnostic undefined there"
                )
            level = [float(apply_map(tf, x)) for x in level]
    expected = power_gap(tf, f, n, wdf)

    forward: list[float] = []
    backward: list[float] = []
    for k in ks:
        if k < 2:
            raise ValueError("pair offsets 1/k need k >= 2")
        om = wdf - 1.0 / k
        oh = wdf + 1.0 / k
        if not (0.0 <= om and oh < 1.0):
            raise ValueError(f"pair at 1/k={1.0/k} leaves [0,1) around wd={wdf}")
        fo = abs(f(float(orbit(tf, om, n, n)[0])) - f(float(orbit(tf, oh, n, n)[0])))
        bo = orbit(tf, om, -depth, 0)
        bh = orbit(tf, oh, -depth, 0)
        bs = max(abs(f(float(a)) - f(float(b))) for a, b in zip(bo, bh))
        forward.append(fo)
        backward.append(bs)

    slack = 1.10
    fc = all(
        abs(b - expected) <= slack * abs(a - expected) + 1e-12
        for a, b in zip(forward, forward[1:])
    ) and (expected > 0 and abs(forward[-1] - expected) <= 0.10 * expected)
    bsh = all(b <= slack * a + 1e-12 for a, b in zip(backward, backward[1:]))
    return PairWitnessReport(
        n=n,
        wd=wdf,
        depth=depth,
        ks=tuple(ks),
        expected_gap=expected,
        forward_gaps=tuple(forward),
        backward_sups=tuple(backward),
        forward_converges=fc,
        backward_shrinks=bsh,
        verdict=(expected > 0) and fc and bsh,
    )


def lipschitz_propagation(
    t: Iet, f: SamplingFunction, n: int, samples: int, seed: int
) -> float:
    """Empirical sup of |f(T^n x) - f(T^n y)| / |x - y| over sampled pairs.

    While every composition f o T^m (m <= n) is continuous the ratio is
    bounded by f's own Lipschitz constant (the jumps telescope away);
    a value above it certifies some discontinuous composition.  Pairs are
    drawn at several separation scales, plus one pair around each
    candidate discontinuity of T^n so a jump cannot hide between samples.
    """
    if f.metadata.lipschitz_constant is None:
        raise ValueError("f carries no Lipschitz constant")
    tf = t.as_float()
    rng = np.random.default_rng(seed)
    scales = (1e-2, 1e-4, 1e-6)
    pairs: list[tuple[float, float]] = []
    for i in range(samples):
        x = float(rng.random())
        h = scales[i % len(scales)] * (0.5 + rng.random())
        y = x + h
        if y >= 1.0:
            y = x - h
            if y < 0.0:
                continue
            x, y = y, x
        pairs.append((x, y))
    h = 1e-9
    for wd in discontinuities_of_power(tf, n):
        wdf = float(wd)
        if h < wdf < 1.0 - h:
            pairs.append((wdf - h, wdf + h))

    sup = 0.0
    for x, y in pairs:
        vx = f(float(orbit(tf, x, n, n)[0]))
        vy = f(float(orbit(tf, y, n, n)[0]))
        ratio = abs(vx - vy) / (y - x)
        if ratio > sup:
            sup = ratio
    return sup


@dataclass(frozen=True)
class ExtremumModulus:
    """Grid-certified modulus table for a non-degenerate extremum.

    For each requested eps, ``delta`` is the largest margin such that any
    point within delta of the extreme value must lie within eps of the
    extremum (distances on the circle).  All-positive deltas certify
    non-degeneracy at grid resolution.
    """

    location: float
    is_minimum: bool
    eps: tuple[float, ...]
    delta: tuple[float, ...]
    passed: bool


def nondegenerate_extremum_check(
    f: SamplingFunction, eps_grid: Sequence[float], grid: int = 100_000
) -> ExtremumModulus:
    """Compute delta(eps) on a fine grid for the declared extremum."""
    ext = f.metadata.extremum
    if ext is None:
        raise ValueError("f declares no extremum")
    xs = np.arange(grid) / grid
    vals = np.array([kernels.eval_sampler(f.kernel_kind, f.par_a, f.par_b, x) for x in xs])
    if ext.is_minimum:
        vals = -vals
    fm = float(np.max(vals))
    d = np.abs(xs - ext.location) % 1.0
    circdist = np.minimum(d, 1.0 - d)
    deltas: list[float] = []
    for eps in eps_grid:
        far = vals[circdist > eps]
        if len(far) == 0:
            deltas.append(float("inf"))
        else:
            deltas.append(fm - float(np.max(far)))
    passed = all(dv > 0 for dv in deltas)
    return ExtremumModulus(
        location=ext.location,
        is_minimum=ext.is_minimum,
        eps=tuple(float(e) for e in eps_grid),
        delta=tuple(deltas),
        passed=passed,
    )


# ---------------------------------------------------------------------------
# JSON round-trip


def function_to_json_dict(f: SamplingFunction) -> dict:
    if f.kind == "constant":
        params: dict = {"c": float(f.par_a[0])}
    elif f.kind == "cosine":
        params = {"lam": float(f.par_a[0])}
    elif f.kind == "trig_poly":
        params = {"cos": [float(x) for x in f.par_a], "sin": [float(x) for x in f.par_b]}
    else:
        params = {"x": [float(x) for x in f.par_a], "y": [float(x) for x in f.par_b]}
    meta = f.metadata
    return {
        "kind": f.kind,
        "params": params,
        "metadata": {
            "lipschitz_constant": meta.lipschitz_constant,
            "level_set_bound": meta.level_set_bound,
            "extremum": (
                None
                if meta.extremum is None
                else {
                    "location": meta.extremum.location,
                    "is_minimum": meta.extremum.is_minimum,
                }
            ),
            "is_constant": meta.is_constant,
        },
    }


def function_from_json_dict(d: dict) -> SamplingFunction:
    meta_d = d.get("metadata")
    metadata = None
    if meta_d is not None:
        ext = meta_d.get("extremum")
        metadata = FunctionMetadata(
            lipschitz_constant=meta_d.get("lipschitz_constant"),
            level_set_bound=meta_d.get("level_set_bound"),
            extremum=None
            if ext is None
            else Extremum(location=ext["location"], is_minimum=ext.get("is_minimum", False)),
            is_constant=bool(meta_d.get("is_constant", False)),
        )
    kind = d["kind"]
    params = d.get("params", {})
    if kind == "constant":
        return constant(float(params["c"]))
    if kind == "cosine":
        return cosine(float(params["lam"]), metadata=metadata)
    if kind == "trig_poly":
        return trig_polynomial(params.get("cos", []), params.get("sin", []), metadata=metadata)
    if kind == "piecewise_linear":
        return piecewise_linear(params["x"], params["y"], metadata=metadata)
    if kind == "step":
        return step_function(params["x"], params["y"], metadata=metadata)
    raise ValueError(f"unknown sampling-function kind {kind!r}")


def function_to_json(f: SamplingFunction, indent: int | None = None) -> str:
    return json.dumps(function_to_json_dict(f), indent=indent)


def function_from_json(text: str) -> SamplingFunction:
    return function_from_json_dict(json.loads(text))
