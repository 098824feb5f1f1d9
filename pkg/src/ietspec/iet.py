"""Interval exchange transformations: exact evaluation and orbit analysis.

An exchange is specified by a permutation pi of {1..r} and a positive
length vector summing to 1.  The unit interval is cut at the prefix sums
and the pieces are translated so they appear in the order prescribed by
pi.  The map is a right-continuous bijection of [0,1).

Two arithmetic modes are supported.  Float mode is the fast path for
long-orbit numerics; rational mode (``fractions.Fraction`` throughout)
makes orbit collisions exact statements, which is what turns an endpoint
collision into a proof that the Keane condition fails.
"""

from __future__ import annotations

import json
from bisect import bisect_left, bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from .permutation import Permutation

__all__ = [
    "Iet",
    "KeaneVerdict",
    "KeaneWitness",
    "apply_map",
    "apply_inverse",
    "orbit",
    "left_limit_power",
    "discontinuities_of_power",
    "backward_discontinuities",
    "keane_falsify",
    "verify_keane_witness",
    "minimality_probe",
    "find_alignment",
    "rotation_iet",
    "golden_rotation",
    "iet_to_json_dict",
    "iet_from_json_dict",
]

Number = Union[float, Fraction]

FLOAT_SUM_TOL = 1e-12
FLOAT_COLLISION_TOL = 1e-12


@dataclass(frozen=True)
class Iet:
    """An interval exchange transformation (pi, lengths).

    ``lefts[j]`` is the left endpoint of the j-th source interval
    (0-indexed), ``offsets[j]`` its translation amount, so the map is
    ``w + offsets[j]`` on ``[lefts[j], lefts[j] + lengths[j])``.
    ``image_lefts`` are the same cut points on the image side, used by the
    inverse.  ``mode`` is "float" or "rational".
    """

    perm: Permutation
    lengths: tuple[Number, ...]
    mode: str
    lefts: tuple[Number, ...]
    image_lefts: tuple[Number, ...]
    offsets: tuple[Number, ...]

    @classmethod
    def make(cls, perm: Permutation, lengths: Sequence, mode: str = "float") -> "Iet":
        if mode not in ("float", "rational"):
            raise ValueError(f"unknown arithmetic mode {mode!r}")
        if len(lengths) != perm.r:
            raise ValueError(
                f"{perm.r} intervals but {len(lengths)} lengths given"
            )
        if mode == "rational":
            lam = tuple(Fraction(x) for x in lengths)
            if any(x <= 0 for x in lam):
                raise ValueError("lengths must be positive")
            if sum(lam) != 1:
                raise ValueError(f"rational lengths must sum to 1, got {sum(lam)}")
        else:
            raw = tuple(float(x) for x in lengths)
            if any(x <= 0.0 for x in raw):
                raise ValueError("lengths must be positive")
            total = sum(raw)
            if abs(total - 1.0) > FLOAT_SUM_TOL:
                raise ValueError(f"float lengths must sum to 1 within 1e-12, got {total}")
            lam = tuple(x / total for x in raw)

        r = perm.r
        zero = Fraction(0) if mode == "rational" else 0.0
        lefts = [zero]
        for j in range(r - 1):
            lefts.append(lefts[-1] + lam[j])
        # image slot q starts after the lengths of all intervals mapped
        # before it
        image_lefts = [zero] * r
        acc = zero
        for q in range(1, r + 1):
            image_lefts[q - 1] = acc
            acc = acc + lam[perm.inverse(q) - 1]
        offsets = tuple(
            image_lefts[perm(j + 1) - 1] - lefts[j] for j in range(r)
        )
        return cls(
            perm=perm,
            lengths=lam,
            mode=mode,
            lefts=tuple(lefts),
            image_lefts=tuple(image_lefts),
            offsets=tuple(offsets),
        )

    @property
    def r(self) -> int:
        return self.perm.r

    def interior_endpoints(self) -> tuple[Number, ...]:
        """The r-1 interior cut points (the discontinuities of the map)."""
        return self.lefts[1:]

    def as_float(self) -> "Iet":
        if self.mode == "float":
            return self
        return Iet.make(self.perm, [float(x) for x in self.lengths], "float")

    def inverse_exchange(self) -> "Iet":
        """The exchange computing T^{-1}: permutation pi^{-1}, lengths permuted."""
        inv_image = tuple(self.perm.inverse(q) for q in range(1, self.r + 1))
        lengths = [self.lengths[self.perm.inverse(q) - 1] for q in range(1, self.r + 1)]
        return Iet.make(Permutation(inv_image), lengths, self.mode)


def apply_map(t: Iet, w: Number) -> Number:
    """T(w) for w in [0,1)."""
    if w < 0 or w >= 1:
        raise ValueError(f"point {w} outside [0,1)")
    j = bisect_right(t.lefts, w) - 1
    return w + t.offsets[j]


def apply_inverse(t: Iet, w: Number) -> Number:
    """T^{-1}(w) for w in [0,1)."""
    if w < 0 or w >= 1:
        raise ValueError(f"point {w} outside [0,1)")
    q = bisect_right(t.image_lefts, w) - 1
    j = t.perm.inverse(q + 1) - 1
    return w - t.offsets[j]


def orbit(t: Iet, w: Number, n_from: int, n_to: int) -> list[Number]:
    """[T^n w for n in n_from..n_to], stepping incrementally."""
    if n_from > n_to:
        raise ValueError(f"empty range {n_from}..{n_to}")
    x = w
    if n_from >= 0:
        for _ in range(n_from):
            x = apply_map(t, x)
    else:
        for _ in range(-n_from):
            x = apply_inverse(t, x)
    out = [x]
    for _ in range(n_to - n_from):
        x = apply_map(t, x)
        out.append(x)
    return out


def _left_branch_step(t: Iet, y: Number) -> Number:
    # translate y by the branch of T acting immediately to its left: y is
    # treated as the right endpoint of the interval whose closure contains
    # it from the left
    j = bisect_left(t.lefts, y) - 1
    return y + t.offsets[j]


def left_limit_power(t: Iet, w: Number, n: int) -> Number:
    """lim_{x -> w from below} T^n(x), for w in (0,1] and n >= 1.

    Computed symbolically: one left-branch translation per step, never a
    numeric limit.  Values live in (0,1] (the left limit at an interval
    endpoint can be 1).  Right limits need no operation of their own: the
    map is right-continuous, so they equal plain forward iteration.
    """
    if n < 1:
        raise ValueError("left limits of powers need n >= 1")
    if w <= 0 or w > 1:
        raise ValueError(f"point {w} outside (0,1]")
    y = w
    for _ in range(n):
        y = _left_branch_step(t, y)
    return y


def discontinuities_of_power(t: Iet, n: int) -> list[Number]:
    """Sorted candidate discontinuity points of T^n.

    Accumulates n backward pull-backs of the interior cut points:
    the union of T^{-m}(cuts) for m = 0..n-1.  Under the Keane condition
    these n*(r-1) points are distinct and all genuine; without it the set
    may contain points where the jump actually cancels.
    """
    if n < 1:
        raise ValueError("powers need n >= 1")
    points: set[Number] = set()
    level = list(t.interior_endpoints())
    for _ in range(n):
        points.update(level)
        level = [apply_inverse(t, x) for x in level]
    return sorted(points)


def backward_discontinuities(t: Iet, n: int) -> list[Number]:
    """Sorted candidate discontinuity points of T^{-m} for 1 <= m <= n.

    The inverse map breaks at the image-side cut points; pulling those
    back through T^{-1} means pushing them forward through T.
    """
    if n < 1:
        raise ValueError("powers need n >= 1")
    points: set[Number] = set()
    level = [x for x in t.image_lefts[1:]]
    for _ in range(n):
        points.update(level)
        level = [apply_map(t, x) for x in level]
    return sorted(points)


@dataclass(frozen=True)
class KeaneWitness:
    source_index: int  # which left endpoint's orbit collided (0-based)
    step: int  # m >= 1 with T^m(source) at the collision
    target_index: Optional[int]  # colliding interior endpoint, or None = periodic return
    value: Number  # the orbit point at the collision
    distance: float  # 0 for exact collisions; <1e-12 for suspected ones


@dataclass(frozen=True)
class KeaneVerdict:
    """Outcome of the Keane falsifier.

    ``violated`` is only reported in rational mode, where the collision is
    an exact equality and hence a proof.  Float mode can merely suspect a
    collision (distance below 1e-12).
    """

    status: str  # "violated" | "suspected-violation" | "no-violation-up-to-horizon"
    witness: Optional[KeaneWitness]
    horizon: int
    min_separation: float


def keane_falsify(t: Iet, horizon: int) -> KeaneVerdict:
    """Search the endpoint orbits for collisions up to the horizon.

    The orbits of all r left endpoints are iterated (the orbit of 0 rides
    along; for any irreducible exchange it is a tail of an interior
    endpoint's orbit, so it adds no spurious detections).  A violation is
    an orbit point landing on an *interior* cut point, or an orbit
    returning to its own starting point.  Hitting 0 is not a collision:
    the interval ending at the cut point sent to the origin does so for
    every exchange with the same permutation, rational or not.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    targets = list(t.interior_endpoints())
    exact = t.mode == "rational"
    min_sep = float("inf")

    for i, start in enumerate(t.lefts):
        x = start
        for m in range(1, horizon + 1):
            x = apply_map(t, x)
            for j, tgt in enumerate(targets):
                d = abs(float(x - tgt))
                if x == tgt:
                    status = "violated" if exact else "suspected-violation"
                    return KeaneVerdict(
                        status,
                        KeaneWitness(i, m, j + 1, x, 0.0),
                        horizon,
                        0.0,
                    )
                if d < min_sep:
                    min_sep = d
                if not exact and d < FLOAT_COLLISION_TOL:
                    return KeaneVerdict(
                        "suspected-violation",
                        KeaneWitness(i, m, j + 1, x, d),
                        horizon,
                        d,
                    )
            d0 = abs(float(x - start))
            if x == start:
                status = "violated" if exact else "suspected-violation"
                return KeaneVerdict(
                    status, KeaneWitness(i, m, None, x, 0.0), horizon, 0.0
                )
            if d0 < min_sep:
                min_sep = d0
            if not exact and d0 < FLOAT_COLLISION_TOL:
                return KeaneVerdict(
                    "suspected-violation",
                    KeaneWitness(i, m, None, x, d0),
                    horizon,
                    d0,
                )
    return KeaneVerdict("no-violation-up-to-horizon", None, horizon, min_sep)


def verify_keane_witness(t: Iet, witness: KeaneWitness) -> bool:
    """Re-run the colliding orbit directly and confirm the reported hit."""
    x = orbit(t, t.lefts[witness.source_index], witness.step, witness.step)[0]
    if x != witness.value:
        return False
    if witness.target_index is None:
        return x == t.lefts[witness.source_index]
    return x == t.interior_endpoints()[witness.target_index - 1]


def minimality_probe(t: Iet, w: Number, n: int, eps: float) -> bool:
    """True iff {T^k w : 1 <= k <= n} is eps-dense in [0,1].

    Checks that the sorted orbit points together with 0 and 1 leave no gap
    of size eps or more.  A probe, not a decision procedure: minimality
    itself is not finitely checkable.
    """
    if n < 1:
        raise ValueError("need n >= 1")
    if eps >= 1:
        return True
    pts = sorted(float(x) for x in orbit(t, w, 1, n))
    pts = [0.0] + pts + [1.0]
    return all(b - a < eps for a, b in zip(pts, pts[1:]))


def find_alignment(
    t: Iet,
    w: Number,
    w2: Number,
    n: int,
    eps: float,
    search_limit: int,
) -> Optional[int]:
    """Find l >= 0 with |T^m(w) - T^{m+l}(w2)| < eps for all |m| <= n.

    Mirrors the minimality argument: on the maximal interval around w free
    of discontinuities of T^m for all |m| <= n, every such power is a
    translation, so any orbit point of w2 landing in that interval (and
    within eps of w) aligns the two orbits for the whole window.  The
    returned l is re-verified by direct evaluation of all 2n+1 bounds.

    Returns None when no l <= search_limit works; that signals the horizon
    was too small, never non-existence.
    """
    if n < 0:
        raise ValueError("window size n must be >= 0")
    cuts: set[float] = {0.0, 1.0}
    if n >= 1:
        cuts.update(float(x) for x in discontinuities_of_power(t, n))
        cuts.update(float(x) for x in backward_discontinuities(t, n))
    wf = float(w)
    lo = max(c for c in cuts if c <= wf)
    hi = min(c for c in cuts if c > wf)

    base = orbit(t, w, -n, n) if n >= 1 else [w]
    x = w2
    for l in range(search_limit + 1):
        xf = float(x)
        if lo <= xf < hi and abs(xf - wf) < eps:
            cand = orbit(t, x, -n, n) if n >= 1 else [x]
            if all(
                abs(float(a) - float(b)) < eps for a, b in zip(base, cand)
            ):
                return l
        x = apply_map(t, x)
    return None


def rotation_iet(alpha: float | Fraction, mode: str = "float") -> Iet:
    """The two-interval exchange acting as x -> x + alpha (mod 1)."""
    if not 0 < alpha < 1:
        raise ValueError("rotation amount must lie in (0,1)")
    one = Fraction(1) if mode == "rational" else 1.0
    return Iet.make(Permutation((2, 1)), [one - alpha, alpha], mode)


def golden_rotation() -> Iet:
    """Rotation by the inverse golden mean (sqrt(5)-1)/2, float mode."""
    g = (5 ** 0.5 - 1) / 2
    return rotation_iet(g)


def iet_to_json_dict(t: Iet) -> dict:
    if t.mode == "rational":
        lengths = [f"{x.numerator}/{x.denominator}" for x in t.lengths]
    else:
        lengths = [float(x) for x in t.lengths]
    return {"perm": list(t.perm.image), "lengths": lengths, "mode": t.mode}


def iet_from_json_dict(d: dict) -> Iet:
    perm = Permutation(tuple(int(v) for v in d["perm"]))
    mode = d.get("mode", "float")
    if mode == "rational":
        lengths = [Fraction(str(x)) for x in d["lengths"]]
    else:
        lengths = [float(x) for x in d["lengths"]]
    return Iet.make(perm, lengths, mode)


def iet_to_json(t: Iet, indent: int | None = None) -> str:
    return json.dumps(iet_to_json_dict(t), indent=indent)


def iet_from_json(text: str) -> Iet:
    return iet_from_json_dict(json.loads(text))
