"""Gordon near-periodicity certificates and Liouville rotation building.

A potential has the Gordon property when it has near-periods q_k whose
q_k-shifts agree super-exponentially well: s_k * exp(C q_k) -> 0 for every
C, where s_k = sup_{0<=j<q_k} |V(j) - V(j +- q_k)|.  Operators with such
potentials have no eigenvalues.  For an exchange orbit with a Holder
sampling function, s_k is controlled by the orbit displacement
d(q) = sup_j |T^j w - T^{j +- q} w|, so the hunt is for return times with
tiny displacement.

For rotations the displacement at a convergent denominator q_k is exactly
the distance of q_k * alpha to the integers, which the continued fraction
controls; a rotation number can therefore be *built* with prescribed
displacement decay by choosing partial quotients greedily.  The catch is
that super-exponential decay makes the quotients themselves explode: for
decay exp(-3q) the third quotient already needs ~1e28 digits.  Quotients
are materialized as exact integers while they fit; past that, level sizes
are carried in log10 as mpmath floats (whose exponents are themselves
big integers) and certified by the greedy inequality rather than by
evaluation.  Every materialized level is still re-checkable digit by
digit.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np
from mpmath import mp, mpf

from . import kernels
from .iet import Iet, apply_inverse, orbit
from .sampling import SamplingFunction
from .spectral import Potential

__all__ = [
    "ContinuedFraction",
    "continued_fraction_of",
    "gordon_sup_diff",
    "find_return_times",
    "GrowthSpec",
    "LiouvilleLevel",
    "LiouvilleRotation",
    "build_liouville_rotation",
    "GordonCertificate",
    "gordon_certificate",
    "liouville_gordon_certificate",
]

LOG10_E = mpf("0.434294481903251827651128918916605082294397005803666566114454")


@dataclass(frozen=True)
class ContinuedFraction:
    """[0; a_1, a_2, ...] with arbitrary-precision integer quotients."""

    quotients: tuple[int, ...]

    def __post_init__(self):
        if not self.quotients or any(a < 1 for a in self.quotients):
            raise ValueError("partial quotients must be positive integers")

    def convergents(self) -> list[tuple[int, int]]:
        """(p_k, q_k) for k = 1..len(quotients); exact integers."""
        p_prev, q_prev = 1, 0
        p, q = 0, 1
        out = []
        for a in self.quotients:
            p, p_prev = a * p + p_prev, p
            q, q_prev = a * q + q_prev, q
            out.append((p, q))
        return out

    def identity_defects(self) -> list[int]:
        """p_k q_{k-1} - p_{k-1} q_k - (-1)^(k-1) over k; all zero when exact."""
        cs = [(0, 1)] + self.convergents()
        out = []
        for k in range(1, len(cs)):
            p, q = cs[k]
            pp, qp = cs[k - 1]
            out.append(p * qp - pp * q - (-1) ** (k - 1))
        return out

    def value(self, dps: int = 50) -> mpf:
        """Evaluate the (finite) fraction bottom-up at dps digits."""
        with mp.workdps(dps + 10):
            x = mpf(0)
            for a in reversed(self.quotients):
                x = 1 / (a + x)
            return +x

    def to_text(self) -> str:
        return "[0; " + ", ".join(str(a) for a in self.quotients) + "]"

    @classmethod
    def from_text(cls, text: str) -> "ContinuedFraction":
        body = text.strip()
        if not (body.startswith("[") and body.endswith("]")):
            raise ValueError(f"bad continued fraction text {text!r}")
        body = body[1:-1]
        head, _, tail = body.partition(";")
        if head.strip() != "0":
            raise ValueError("only numbers in (0,1) supported: integer part must be 0")
        quotients = tuple(int(tok) for tok in tail.replace(",", " ").split())
        return cls(quotients)


def continued_fraction_of(x, count: int, dps: int = 60) -> ContinuedFraction:
    """First ``count`` partial quotients of x in (0,1)."""
    with mp.workdps(dps):
        y = mpf(x)
        if not 0 < y < 1:
            raise ValueError("need x in (0,1)")
        qs = []
        for _ in range(count):
            y = 1 / y
            a = int(mp.floor(y))
            qs.append(a)
            y = y - a
            if y == 0:
                break
        return ContinuedFraction(tuple(qs))


def gordon_sup_diff(v: Potential, q: int) -> float:
    """sup over 0 <= j < q of max(|V(j)-V(j+q)|, |V(j)-V(j-q)|).

    Float64 resolution: differences below ~1e-15 of the potential scale
    read as noise; the high-precision path in the Liouville certificate
    exists for those scales.
    """
    if q < 1:
        raise ValueError("need q >= 1")
    if v.n_from > -q or v.n_to < 2 * q:
        raise ValueError(
            f"window [{v.n_from}, {v.n_to}) does not cover [-{q}, {2 * q})"
        )
    mid = v.slice(0, q)
    up = v.slice(q, 2 * q)
    down = v.slice(-q, 0)
    return float(max(np.abs(mid - up).max(), np.abs(mid - down).max()))


def _circle_gap(a: np.ndarray, b: np.ndarray) -> float:
    d = np.abs(a - b)
    return float(np.minimum(d, 1.0 - d).max())


def find_return_times(
    t: Iet, w: float, q_max: int, top: int = 10
) -> list[tuple[int, float]]:
    """The ``top`` shifts q <= q_max with smallest orbit displacement.

    Displacement d(q) = sup_{0<=j<q} max(dist(T^j w, T^{j+q} w),
    dist(T^j w, T^{j-q} w)) with distances on the circle (so a near-return
    that wraps past the origin still counts as near; for a rotation d(q)
    is then exactly the distance of q*alpha to the integers, independent
    of w).  Sorted by (d, q); no monotonicity in q is implied.  One orbit
    of length 3*q_max is filled, then each q is a sliding comparison.
    """
    if q_max < 2:
        raise ValueError("need q_max >= 2")
    tf = t.as_float()
    x = float(w)
    for _ in range(q_max):
        x = apply_inverse(tf, x)
    lefts, offsets = kernels.iet_arrays(tf)
    orb = np.empty(3 * q_max, dtype=np.float64)
    kernels.orbit_fill(lefts, offsets, x, orb)
    base = q_max  # orb[base + j] = T^j(w)
    out = []
    for q in range(1, q_max + 1):
        mid = orb[base : base + q]
        up = orb[base + q : base + 2 * q]
        down = orb[base - q : base]
        d = max(_circle_gap(mid, up), _circle_gap(mid, down))
        out.append((q, d))
    out.sort(key=lambda pair: (pair[1], pair[0]))
    return out[:top]


@dataclass(frozen=True)
class GrowthSpec:
    """Displacement target f(q) for the Liouville construction.

    kind "exp": f(q) = exp(-rate * q); kind "power": f(q) = q ** (-rate).
    Everything is handled through log10 so super-exponential scales stay
    representable.
    """

    kind: str
    rate: float

    def __post_init__(self):
        if self.kind not in ("exp", "power") or self.rate <= 0:
            raise ValueError(f"bad growth spec {self.kind}:{self.rate}")

    def log10_from_log10q(self, log10_q: mpf) -> mpf:
        """log10 f(q) given log10 q (works for astronomically large q)."""
        if self.kind == "exp":
            return -mpf(self.rate) * mp.power(10, log10_q) * LOG10_E
        return -mpf(self.rate) * log10_q

    def log10_at(self, q: int) -> mpf:
        if self.kind == "exp":
            return -mpf(self.rate) * q * LOG10_E
        return -mpf(self.rate) * mp.log(q, 10)

    def to_text(self) -> str:
        return f"{self.kind}:{self.rate:g}"

    @classmethod
    def from_text(cls, text: str) -> "GrowthSpec":
        kind, _, rate = text.partition(":")
        return cls(kind=kind.strip(), rate=float(rate))


@dataclass(frozen=True)
class LiouvilleLevel:
    """One certified scale q_k of a constructed rotation.

    ``q`` is the exact integer denominator when it fits, else None with
    only ``log10_q`` meaningful.  ``displacement_log10`` is the
    fraction-exact bound log10(1/q_{k+1}) when the next denominator was
    materialized; ``target_log10`` is the requested log10 f(q_k).  The
    construction guarantees displacement <= target at every level.
    """

    k: int
    a: Optional[int]
    q: Optional[int]
    log10_q: mpf
    target_log10: mpf
    displacement_log10: Optional[mpf]
    verified: str  # "cf-exact" | "greedy-bound"

    def as_json_dict(self) -> dict:
        return {
            "k": self.k,
            "a": str(self.a) if self.a is not None else None,
            "q": str(self.q) if self.q is not None else None,
            "log10_q": _log_str(self.log10_q),
            "target_log10": _log_str(self.target_log10),
            "displacement_log10": (
                _log_str(self.displacement_log10)
                if self.displacement_log10 is not None
                else None
            ),
            "verified": self.verified,
        }


def _log_str(x: mpf) -> str:
    return mp.nstr(x, 12)


def _float_or_inf(x: mpf) -> float:
    try:
        return float(x)
    except (OverflowError, ValueError):
        return float("-inf") if x < 0 else float("inf")


@dataclass(frozen=True)
class LiouvilleRotation:
    """A rotation number with prescribed near-period displacement decay.

    ``alpha`` is an mpf sharing its materialized continued fraction prefix
    with every completion of the construction; the unmaterialized tail
    contributes below any workable precision, so all of them are the same
    number to a computation at ``dps`` digits.
    """

    cf: ContinuedFraction
    alpha: mpf
    levels: tuple[LiouvilleLevel, ...]
    growth: GrowthSpec
    dps: int

    def iet(self) -> Iet:
        from .iet import rotation_iet

        return rotation_iet(float(self.alpha))

    def to_json_dict(self) -> dict:
        return {
            "alpha_digits": mp.nstr(self.alpha, self.dps),
            "continued_fraction": self.cf.to_text(),
            "growth": self.growth.to_text(),
            "dps": self.dps,
            "levels": [lv.as_json_dict() for lv in self.levels],
        }


def build_liouville_rotation(
    growth: GrowthSpec,
    k_max: int,
    dps: int = 220,
    digit_cap: int = 6000,
) -> LiouvilleRotation:
    """Choose partial quotients greedily so ||q_k alpha|| <= f(q_k).

    The greedy step certifying scale q_k takes a_{k+1} minimal with
    q_k / q_{k+1} <= f(q_k); then ||q_k alpha|| < 1/q_{k+1} <= f(q_k)/q_k
    for every completion of the fraction.  Levels k = 1..k_max are
    certified, which requires the k_max+1 leading quotients (as far as
    they can be written down).
    """
    if k_max < 1:
        raise ValueError("need k_max >= 1")
    if k_max > 8:
        raise ValueError("k_max > 8: denominators explode; nothing is learned past 8")

    quotients: list[int] = []
    q_ints: list[Optional[int]] = [1]  # q_ints[k] = q_k; q_0 = 1
    log10_qs: list[mpf] = [mpf(0)]
    exact = True
    q_prev2: Optional[int] = 0  # q_{-1}

    for k in range(0, k_max + 1):
        # choose a_{k+1} certifying scale q_k
        log10_target = (
            growth.log10_at(q_ints[k]) if exact else growth.log10_from_log10q(log10_qs[k])
        )
        if exact:
            digits_of_a = float(-log10_target) if mp.isfinite(log10_target) else math.inf
            if digits_of_a + 40 <= digit_cap:
                q_k = q_ints[k]
                with mp.workdps(int(max(digits_of_a, 0)) + 60):
                    target = mp.power(10, -growth.log10_at(q_k)) * q_k  # q_k / f(q_k)
                    a = max(1, int(mp.ceil((target - q_prev2) / q_k)))
                q_next: Optional[int] = a * q_k + q_prev2
                quotients.append(a)
                q_ints.append(q_next)
                log10_qs.append(mpf(mp.log(q_next, 10)))
                q_prev2 = q_k
                continue
            exact = False
        # symbolic continuation: a ~ q_k / f(q_k) / q_k, q_{k+1} ~ q_k / f(q_k)
        q_ints.append(None)
        log10_qs.append(log10_qs[k] - log10_target)

    levels = []
    for k in range(1, k_max + 1):
        target_log10 = (
            growth.log10_at(q_ints[k])
            if q_ints[k] is not None
            else growth.log10_from_log10q(log10_qs[k])
        )
        if q_ints[k + 1] is not None:
            disp: Optional[mpf] = -log10_qs[k + 1]
            verified = "cf-exact"
        else:
            disp = None
            verified = "greedy-bound"
        levels.append(
            LiouvilleLevel(
                k=k,
                a=quotients[k - 1] if k - 1 < len(quotients) else None,
                q=q_ints[k],
                log10_q=log10_qs[k],
                target_log10=target_log10,
                displacement_log10=disp,
                verified=verified,
            )
        )

    cf = ContinuedFraction(tuple(quotients))
    alpha = cf.value(dps)
    return LiouvilleRotation(cf=cf, alpha=alpha, levels=tuple(levels), growth=growth, dps=dps)


@dataclass(frozen=True)
class GordonCertificate:
    """Per-scale shift agreement and the verdicts it supports.

    ``sup_diffs`` holds measured s_k where computable (None where a level
    carries only a construction bound); ``sup_diff_log10`` always holds
    the certified log10 value or bound (mpf, possibly with a huge
    exponent).  For each tested C the certificate passes when the
    products s_k * exp(C q_k) decrease toward 0 over the tested scales.
    """

    qs: tuple[Optional[int], ...]
    q_log10: tuple[mpf, ...]
    sup_diffs: tuple[Optional[float], ...]
    sup_diff_log10: tuple[mpf, ...]
    tested_C: tuple[float, ...]
    product_log10: dict[float, tuple[mpf, ...]]
    verdicts: dict[float, bool]
    chaining_ok: Optional[bool]
    alpha_digits: Optional[str] = None

    def to_json_dict(self) -> dict:
        return {
            "alpha_digits": self.alpha_digits,
            "qs": [str(q) if q is not None else None for q in self.qs],
            "q_log10": [_log_str(x) for x in self.q_log10],
            "sup_diffs": list(self.sup_diffs),
            "sup_diff_log10": [_log_str(x) for x in self.sup_diff_log10],
            "C_verdicts": {str(c): self.verdicts[c] for c in self.tested_C},
            "product_log10": {
                str(c): [_log_str(x) for x in self.product_log10[c]]
                for c in self.tested_C
            },
            "chaining_ok": self.chaining_ok,
        }


def _verdict_for(products: Sequence[mpf]) -> bool:
    if all(p == mpf("-inf") for p in products):
        return True  # identically zero shift differences: periodic potential
    decreasing = all(b < a for a, b in zip(products, products[1:]))
    return decreasing and products[-1] < 0


def _products_per_c(
    s_log10: Sequence[mpf], q_vals: Sequence[mpf], cs: Sequence[float]
) -> tuple[dict[float, tuple[mpf, ...]], dict[float, bool]]:
    prods: dict[float, tuple[mpf, ...]] = {}
    verds: dict[float, bool] = {}
    for c in cs:
        row = [s + mpf(c) * qv * LOG10_E for s, qv in zip(s_log10, q_vals)]
        prods[float(c)] = tuple(row)
        verds[float(c)] = _verdict_for(row)
    return prods, verds


def gordon_certificate(
    t: Iet,
    f: SamplingFunction,
    w: float,
    qs: Sequence[int],
    cs: Sequence[float],
) -> GordonCertificate:
    """Enumerated certificate at explicit scales (float64 resolution).

    Builds one potential window covering [-max q, 2 max q) and measures
    every s_k directly.  When f carries a Lipschitz constant, the report
    also checks the chaining inequality s_k <= Lip(f) * d(q_k) against the
    orbit displacement.
    """
    qs = [int(q) for q in qs]
    if any(b <= a for a, b in zip(qs, qs[1:])) or any(q < 1 for q in qs):
        raise ValueError("qs must be strictly increasing positive integers")
    qmax = qs[-1]
    v = Potential(t, f, w, -qmax, 2 * qmax)
    sups = [gordon_sup_diff(v, q) for q in qs]

    chaining_ok: Optional[bool] = None
    lip = f.metadata.lipschitz_constant
    if lip is not None:
        tf = t.as_float()
        orb = [float(x) for x in orbit(tf, w, -qmax, 2 * qmax - 1)]
        base = qmax
        chaining_ok = True
        # circle distances are valid for circle-continuous f, line
        # distances otherwise
        wrap = f.circle_continuous
        for q, s in zip(qs, sups):
            d = 0.0
            for j in range(q):
                for du in (
                    abs(orb[base + j] - orb[base + j + q]),
                    abs(orb[base + j] - orb[base + j - q]),
                ):
                    if wrap:
                        du = min(du, 1.0 - du)
                    d = max(d, du)
            if s > lip * d + 1e-9:
                chaining_ok = False

    s_log10 = [mp.log(mpf(s), 10) if s > 0 else mpf("-inf") for s in sups]
    q_vals = [mpf(q) for q in qs]
    q_log10 = [mp.log(mpf(q), 10) for q in qs]
    prods, verds = _products_per_c(s_log10, q_vals, cs)
    return GordonCertificate(
        qs=tuple(qs),
        q_log10=tuple(q_log10),
        sup_diffs=tuple(float(s) for s in sups),
        sup_diff_log10=tuple(s_log10),
        tested_C=tuple(float(c) for c in cs),
        product_log10=prods,
        verdicts=verds,
        chaining_ok=chaining_ok,
    )


def _mp_eval(f: SamplingFunction, x: mpf) -> mpf:
    if f.kind == "constant":
        return mpf(float(f.par_a[0]))
    if f.kind == "cosine":
        return mpf(float(f.par_a[0])) * mp.cos(2 * mp.pi * x)
    if f.kind == "trig_poly":
        acc = mpf(float(f.par_a[0]))
        for m in range(1, len(f.par_a)):
            ang = 2 * mp.pi * m * x
            acc += mpf(float(f.par_a[m])) * mp.cos(ang)
            if m - 1 < len(f.par_b):
                acc += mpf(float(f.par_b[m - 1])) * mp.sin(ang)
        return acc
    raise ValueError(f"high-precision evaluation unsupported for kind {f.kind!r}")


ENUMERATION_CAP = 200_000


def liouville_gordon_certificate(
    rot: LiouvilleRotation,
    f: SamplingFunction,
    cs: Sequence[float],
    w: float = 0.0,
    enumeration_cap: int = ENUMERATION_CAP,
) -> GordonCertificate:
    """Certificate for a constructed rotation at its own scales q_k.

    Levels small enough are measured by a direct high-precision orbit
    sweep (x_j = w + j alpha mod 1, at the rotation's dps); the rest are
    certified through the sampling function's Lipschitz constant and the
    construction bound on ||q_k alpha||, with products kept in log10 so
    super-exponential scales stay comparable.
    """
    lip = f.metadata.lipschitz_constant
    if lip is None:
        raise ValueError("Liouville certificates need a Lipschitz constant for f")
    dps = rot.dps
    sups: list[Optional[float]] = []
    s_log10: list[mpf] = []
    q_vals: list[mpf] = []
    with mp.workdps(dps):
        alpha = rot.alpha
        wm = mpf(w)
        log10_lip = mp.log(mpf(lip), 10) if lip > 0 else mpf("-inf")
        for lv in rot.levels:
            q_vals.append(mpf(lv.q) if lv.q is not None else mp.power(10, lv.log10_q))
            measurable = (
                lv.q is not None
                and lv.q <= enumeration_cap
                and lv.displacement_log10 is not None
                and float(-lv.displacement_log10) < dps - 30
            )
            if measurable:
                q = lv.q
                s = mpf(0)
                for j in range(q):
                    xj = mp.frac(wm + j * alpha)
                    up = mp.frac(wm + (j + q) * alpha)
                    dn = mp.frac(wm + (j - q) * alpha)
                    s = max(
                        s,
                        abs(_mp_eval(f, xj) - _mp_eval(f, up)),
                        abs(_mp_eval(f, xj) - _mp_eval(f, dn)),
                    )
                sups.append(_float_or_inf(s))
                s_log10.append(mp.log(s, 10) if s > 0 else mpf("-inf"))
            else:
                sups.append(None)
                best = (
                    lv.displacement_log10
                    if lv.displacement_log10 is not None
                    else lv.target_log10
                )
                s_log10.append(log10_lip + best)
        prods, verds = _products_per_c(s_log10, q_vals, cs)
    return GordonCertificate(
        qs=tuple(lv.q for lv in rot.levels),
        q_log10=tuple(lv.log10_q for lv in rot.levels),
        sup_diffs=tuple(sups),
        sup_diff_log10=tuple(s_log10),
        tested_C=tuple(float(c) for c in cs),
        product_log10=prods,
        verdicts=verds,
        chaining_ok=None,
        alpha_digits=mp.nstr(rot.alpha, rot.dps),
    )


def certificate_to_json(cert: GordonCertificate, indent: int | None = None) -> str:
    return json.dumps(cert.to_json_dict(), indent=indent)
