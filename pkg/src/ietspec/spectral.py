"""Transfer-matrix cocycles, Lyapunov exponents and truncated spectra.

The discrete Schrodinger operator with potential V(n) = f(T^n w) is
studied through two finite probes:

* products of the 2x2 transfer matrices [[E - V, -1], [1, 0]] along
  orbits, whose log-norm growth rate estimates the Lyapunov exponent
  L(E); a positive exponent on a set of full measure is the numerical
  signature of empty absolutely continuous spectrum,
* eigenvalues of the operator restricted to a finite box with Dirichlet
  ends, which approximate the spectrum as a set.

Base points are drawn uniformly: Lebesgue measure is invariant for every
interval exchange (piecewise translations), and is the ergodic measure in
the typical uniquely-ergodic case.
"""

from __future__ import annotations

import hashlib
import math
import struct
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from . import kernels
from .iet import Iet, apply_inverse
from .sampling import SamplingFunction

__all__ = [
    "Potential",
    "potential",
    "apply_operator",
    "transfer_step",
    "CocycleProduct",
    "cocycle_product",
    "LyapunovEstimate",
    "lyapunov",
    "lyapunov_grid",
    "SpectrumApprox",
    "truncated_spectrum",
    "tridiagonal_eigenvalues",
    "spectrum_hausdorff",
    "ACReport",
    "ac_indicator",
]

AC_DISCLAIMER = (
    "numerical evidence only: a small low-exponent fraction near the "
    "truncated spectrum suggests empty AC spectrum but cannot prove it; "
    "finite-volume spectra also cannot separate the two inclusion "
    "directions of the omega-independence statements"
)


class Potential:
    """V(n) = f(T^n w) on the half-open window [n_from, n_to).

    Values are materialized on first access: the backward stretch by
    explicit inverse steps, the forward stretch by the orbit kernel.
    """

    def __init__(self, t: Iet, f: SamplingFunction, w: float, n_from: int, n_to: int):
        if n_from > n_to:
            raise ValueError(f"bad window [{n_from}, {n_to})")
        if not 0.0 <= float(w) < 1.0:
            raise ValueError(f"base point {w} outside [0,1)")
        self.iet = t.as_float()
        self.f = f
        self.base = float(w)
        self.n_from = n_from
        self.n_to = n_to

    def __len__(self) -> int:
        return self.n_to - self.n_from

    @cached_property
    def values(self) -> np.ndarray:
        n = len(self)
        out = np.empty(n, dtype=np.float64)
        if n == 0:
            return out
        x = self.base
        for _ in range(-min(self.n_from, 0)):
            x = apply_inverse(self.iet, x)
        lefts, offsets = kernels.iet_arrays(self.iet)
        if self.n_from > 0:
            skip = np.empty(self.n_from, dtype=np.float64)
            x = kernels.orbit_fill(lefts, offsets, x, skip)
        kernels.potential_fill(
            lefts, offsets, self.f.kernel_kind, self.f.par_a, self.f.par_b, float(x), out
        )
        return out

    def value(self, n: int) -> float:
        if not self.n_from <= n < self.n_to:
            raise IndexError(f"index {n} outside window [{self.n_from}, {self.n_to})")
        return float(self.values[n - self.n_from])

    def slice(self, a: int, b: int) -> np.ndarray:
        if not (self.n_from <= a <= b <= self.n_to):
            raise IndexError(f"slice [{a}, {b}) outside window [{self.n_from}, {self.n_to})")
        return self.values[a - self.n_from : b - self.n_from]


def potential(t: Iet, f: SamplingFunction, w: float, n_from: int, n_to: int) -> Potential:
    """Materializable potential window; see :class:`Potential`."""
    return Potential(t, f, w, n_from, n_to)


def apply_operator(v: Potential, psi: Sequence[float]) -> np.ndarray:
    """(H psi)(n) = psi(n+1) + psi(n-1) + V(n) psi(n), zero-padded ends.

    ``psi`` must be indexed exactly by v's window.
    """
    psi = np.asarray(psi, dtype=np.float64)
    if len(psi) != len(v):
        raise ValueError(f"psi has {len(psi)} entries, window has {len(v)}")
    out = v.values * psi
    out[:-1] += psi[1:]
    out[1:] += psi[:-1]
    return out


def transfer_step(energy: float, v: float) -> np.ndarray:
    """One transfer matrix [[E - v, -1], [1, 0]]; determinant exactly 1."""
    return np.array([[energy - v, -1.0], [1.0, 0.0]])


@dataclass(frozen=True)
class CocycleProduct:
    """Rescaled n-step transfer product: exp(log_norm) * unit_matrix.

    The per-16-step max-abs rescale keeps the carried matrix O(1); the
    determinant of the represented product stays 1 up to float drift, but
    its numerical verification is only meaningful while the product's
    condition number stays within float range (see ``det_drift_log``).
    """

    energy: float
    n: int
    log_norm: float
    unit_matrix: np.ndarray
    w_final: float

    def quotient(self) -> float:
        """(1/n) log || product ||, the finite-n Lyapunov quotient."""
        return (self.log_norm + math.log(float(np.linalg.norm(self.unit_matrix)))) / self.n

    def det_drift_log(self) -> float:
        """log |det(represented product)|; 0 means determinant exactly 1.

        Computed as log|det(unit_matrix)| + 2*log_norm.  Once the product
        is strongly hyperbolic the det of the carried matrix underflows
        through cancellation and this diagnostic saturates; it is reliable
        while |log_norm| stays below ~15.
        """
        u = self.unit_matrix
        det = float(u[0, 0] * u[1, 1] - u[0, 1] * u[1, 0])
        if det == 0.0:
            return float("-inf")
        return math.log(abs(det)) + 2.0 * self.log_norm


def cocycle_product(
    t: Iet, f: SamplingFunction, w: float, energy: float, n: int
) -> CocycleProduct:
    """Accumulate the n-step product A(T^{n-1}w) ... A(w)."""
    if n < 1:
        raise ValueError("need n >= 1")
    lefts, offsets = kernels.iet_arrays(t)
    log_norm, a, b, c, d, w_final = kernels.cocycle_accumulate(
        lefts, offsets, f.kernel_kind, f.par_a, f.par_b, float(w), float(energy), int(n)
    )
    return CocycleProduct(
        energy=float(energy),
        n=int(n),
        log_norm=float(log_norm),
        unit_matrix=np.array([[a, b], [c, d]]),
        w_final=float(w_final),
    )


@dataclass(frozen=True)
class LyapunovEstimate:
    energy: float
    n: int
    m_samples: int
    mean: float
    stderr: float
    seed: int


def _quotients(
    t: Iet, f: SamplingFunction, energy: float, n: int, m_samples: int, seed: int
) -> np.ndarray:
    rng = np.random.default_rng(seed)
    lefts, offsets = kernels.iet_arrays(t)
    qs = np.empty(m_samples)
    for i in range(m_samples):
        w = float(rng.random())
        log_norm, a, b, c, d, _ = kernels.cocycle_accumulate(
            lefts, offsets, f.kernel_kind, f.par_a, f.par_b, w, float(energy), int(n)
        )
        qs[i] = (log_norm + 0.5 * math.log(a * a + b * b + c * c + d * d)) / n
    return qs


def lyapunov(
    t: Iet, f: SamplingFunction, energy: float, n: int, m_samples: int, seed: int
) -> LyapunovEstimate:
    """Finite-n Lyapunov quotient averaged over uniform base points.

    Each sample is (1/n) log of the product norm; pointwise this is
    nonnegative for an SL(2,R) product, so a mean inside [-1e-6, 0) is
    rounding noise and gets clamped to zero.
    """
    if n < 1 or m_samples < 1:
        raise ValueError("need n >= 1 and m_samples >= 1")
    qs = _quotients(t, f, energy, n, m_samples, seed)
    mean = float(qs.mean())
    if m_samples > 1:
        stderr = float(qs.std(ddof=1) / math.sqrt(m_samples))
    else:
        stderr = 0.0
    if -1e-6 <= mean < 0.0:
        mean = 0.0
    return LyapunovEstimate(
        energy=float(energy), n=int(n), m_samples=int(m_samples),
        mean=mean, stderr=stderr, seed=int(seed),
    )


def _point_seed(seed: int, energy: float) -> int:
    # stable per-energy derivation: permuting the grid permutes the results
    h = hashlib.blake2b(digest_size=8)
    h.update(struct.pack("<q", seed))
    h.update(struct.pack("<d", float(energy)))
    return int.from_bytes(h.digest(), "little")


def lyapunov_grid(
    t: Iet,
    f: SamplingFunction,
    energies: Sequence[float],
    n: int,
    m_samples: int,
    seed: int,
    threads: int = 1,
) -> list[LyapunovEstimate]:
    """Independent per-energy estimates; output order follows the grid.

    Per-point seeds are derived from (seed, energy bits), so results are
    independent of evaluation order and of the thread count.
    """
    if len(energies) == 0:
        raise ValueError("empty energy grid")
    jobs = [(float(e), _point_seed(seed, float(e))) for e in energies]

    def run(job: tuple[float, int]) -> LyapunovEstimate:
        e, s = job
        est = lyapunov(t, f, e, n, m_samples, s)
        return LyapunovEstimate(
            energy=est.energy, n=est.n, m_samples=est.m_samples,
            mean=est.mean, stderr=est.stderr, seed=seed,
        )

    if threads <= 1:
        return [run(j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(run, jobs))


@dataclass(frozen=True)
class SpectrumApprox:
    """Eigenvalues of the M-site Dirichlet truncation, sorted ascending."""

    M: int
    base: float
    eigenvalues: np.ndarray

    def __post_init__(self):
        ev = self.eigenvalues
        if self.M < 1:
            raise ValueError("need M >= 1")
        if len(ev) != self.M:
            raise ValueError("eigenvalue count must equal M")
        if np.any(np.diff(ev) < 0):
            raise ValueError("eigenvalues must be sorted")


def tridiagonal_eigenvalues(diag: Sequence[float], tol: float = 1e-10) -> np.ndarray:
    """All eigenvalues of tridiag(1, diag, 1) by Sturm bisection.

    Brackets every eigenvalue with Gershgorin bounds and bisects all of
    them in lockstep, one negative-pivot count sweep per iteration, until
    each bracket is narrower than ``tol``.
    """
    d = np.asarray(diag, dtype=np.float64)
    m = len(d)
    if m < 1:
        raise ValueError("need at least a 1x1 matrix")
    lo = np.full(m, float(d.min()) - 2.0)
    hi = np.full(m, float(d.max()) + 2.0)
    want = np.arange(1, m + 1)  # eigenvalue k is below x iff count(x) >= k+1
    for _ in range(200):
        if float((hi - lo).max()) < tol:
            break
        mid = 0.5 * (lo + hi)
        counts = np.asarray(kernels.sturm_counts(d, mid))
        below = counts >= want
        hi = np.where(below, mid, hi)
        lo = np.where(below, lo, mid)
    return 0.5 * (lo + hi)


def truncated_spectrum(v: Potential, M: int) -> SpectrumApprox:
    """Eigenvalues of the box restriction to sites 0..M-1 (Dirichlet)."""
    if M < 1:
        raise ValueError("need M >= 1")
    diag = v.slice(0, M)
    return SpectrumApprox(M=M, base=v.base, eigenvalues=tridiagonal_eigenvalues(diag))


def sturm_count_below(v: Potential, M: int, x: float) -> int:
    """Independent eigenvalue count below x for the same truncation."""
    diag = v.slice(0, M)
    return int(np.asarray(kernels.sturm_counts(diag, np.array([float(x)])))[0])


def spectrum_hausdorff(a: SpectrumApprox, b: SpectrumApprox) -> float:
    """Hausdorff distance between the two finite eigenvalue sets."""
    xs = np.asarray(a.eigenvalues)
    ys = np.asarray(b.eigenvalues)
    if len(xs) == 0 or len(ys) == 0:
        raise ValueError("empty eigenvalue set")

    def one_sided(p: np.ndarray, q: np.ndarray) -> float:
        idx = np.searchsorted(q, p)
        best = np.full(len(p), np.inf)
        ok = idx < len(q)
        best[ok] = np.abs(q[idx[ok]] - p[ok])
        ok = idx > 0
        best[ok] = np.minimum(best[ok], np.abs(q[idx[ok] - 1] - p[ok]))
        return float(best.max())

    return max(one_sided(xs, ys), one_sided(ys, xs))


@dataclass(frozen=True)
class ACReport:
    """Fraction of spectrum-adjacent grid energies with a small exponent.

    A fraction near 1 is what absolutely continuous spectrum looks like
    at finite n; a fraction near 0 is evidence for its absence.  Never a
    proof either way; see ``disclaimer``.
    """

    tau: float
    adjacency_radius: float
    n_grid: int
    n_adjacent: int
    n_low: int
    fraction_low: float
    grid_covers_spectrum: bool
    disclaimer: str = AC_DISCLAIMER

    def to_json_dict(self) -> dict:
        return {
            "tau": self.tau,
            "adjacency_radius": self.adjacency_radius,
            "n_grid": self.n_grid,
            "n_adjacent": self.n_adjacent,
            "n_low": self.n_low,
            "fraction_low": self.fraction_low,
            "grid_covers_spectrum": self.grid_covers_spectrum,
            "disclaimer": self.disclaimer,
        }


def ac_indicator(
    estimates: Sequence[LyapunovEstimate],
    spectrum: SpectrumApprox,
    tau: float = 0.01,
) -> ACReport:
    """Classify grid energies near the truncated spectrum by exponent size.

    An energy is spectrum-adjacent when it lies within 2/M of some
    truncation eigenvalue; among those, the report counts estimates with
    mean below tau.
    """
    if not estimates:
        raise ValueError("no Lyapunov estimates")
    ev = np.asarray(spectrum.eigenvalues)
    radius = 2.0 / spectrum.M
    energies = np.array([est.energy for est in estimates])
    idx = np.searchsorted(ev, energies)
    dist = np.full(len(energies), np.inf)
    ok = idx < len(ev)
    dist[ok] = np.abs(ev[idx[ok]] - energies[ok])
    ok = idx > 0
    dist[ok] = np.minimum(dist[ok], np.abs(ev[idx[ok] - 1] - energies[ok]))
    adjacent = dist <= radius
    low = adjacent & np.array([est.mean < tau for est in estimates])
    n_adj = int(adjacent.sum())
    covers = bool(
        energies.min() <= ev.min() - 0.1 + 1e-12 and energies.max() >= ev.max() + 0.1 - 1e-12
    )
    return ACReport(
        tau=float(tau),
        adjacency_radius=float(radius),
        n_grid=len(energies),
        n_adjacent=n_adj,
        n_low=int(low.sum()),
        fraction_low=(float(low.sum()) / n_adj) if n_adj else float("nan"),
        grid_covers_spectrum=covers,
    )
