"""Combinatorics of interval-exchange permutations.

A permutation pi of {1..r} determines, independently of the interval
lengths, a finite functional digraph on the r+1 points {0, w_1..w_{r-1}, 1}
(the endpoints of the exchanged intervals).  Edges record which one-sided
limits of the exchange map coincide; two of them are marked "special"
(the one leaving 0 and the one entering 1).  The graph is a disjoint union
of cycles, and the distribution of the special edges over the cycles is
what the spectral criteria consume.

Everything here is exact integer combinatorics; no interval lengths appear.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

__all__ = [
    "Permutation",
    "DiscontinuityGraph",
    "TypeWTrace",
    "ClassificationReport",
    "parse_permutation",
    "is_irreducible",
    "rotation_class",
    "build_graph",
    "is_type_w",
    "cross_check_type_w",
    "max_distinct_discontinuity_path",
    "classify",
    "irreducible_permutations",
    "reversal",
    "rotation_permutation",
]


@dataclass(frozen=True)
class Permutation:
    """A bijection of {1..r}, stored in one-line notation.

    ``image[j-1]`` is the value pi(j).  Indices and values are 1-based to
    match the usual interval-exchange conventions.
    """

    image: tuple[int, ...]

    def __post_init__(self):
        r = len(self.image)
        if r < 2:
            raise ValueError("permutation needs r >= 2 symbols")
        if sorted(self.image) != list(range(1, r + 1)):
            raise ValueError(f"not a bijection of {{1..{r}}}: {self.image}")

    @property
    def r(self) -> int:
        return len(self.image)

    def __call__(self, j: int) -> int:
        """pi(j) for 1 <= j <= r."""
        return self.image[j - 1]

    def inverse(self, v: int) -> int:
        """pi^{-1}(v) for 1 <= v <= r."""
        return self.image.index(v) + 1

    def one_line(self) -> str:
        return " ".join(str(v) for v in self.image)

    def __str__(self) -> str:
        return self.one_line()


def parse_permutation(text: str) -> Permutation:
    """Parse one-line notation, e.g. ``"3 2 1"`` (commas also tolerated)."""
    tokens = text.replace(",", " ").split()
    if not tokens:
        raise ValueError("empty permutation string")
    values = []
    for pos, tok in enumerate(tokens):
        try:
            values.append(int(tok))
        except ValueError:
            raise ValueError(f"bad token {tok!r} at position {pos}") from None
    return Permutation(tuple(values))


def reversal(r: int) -> Permutation:
    """The order-reversing permutation j -> r+1-j."""
    return Permutation(tuple(r + 1 - j for j in range(1, r + 1)))


def rotation_permutation(r: int, k: int) -> Permutation:
    """The rotation-class permutation with pi(j) - 1 = j + k (mod r)."""
    return Permutation(tuple((j + k) % r + 1 for j in range(1, r + 1)))


def is_irreducible(p: Permutation) -> bool:
    """False iff pi({1..k}) = {1..k} for some k < r.

    A reducible permutation splits the exchange into two independent ones,
    so all graph-level analysis below insists on irreducibility.
    """
    running_max = 0
    for j in range(1, p.r):
        running_max = max(running_max, p(j))
        if running_max == j:
            return False
    return True


def rotation_class(p: Permutation) -> Optional[int]:
    """The unique k with pi(j) - 1 = j + k (mod r) for all j, if any.

    Permutations of this form generate exchanges conjugate to circle
    rotations; returns None for all others.
    """
    r = p.r
    k = (p(1) - 2) % r
    for j in range(1, r + 1):
        if (p(j) - 1) % r != (j + k) % r:
            return None
    return k


# Vertex labels are fixed strings: "V0", "W1".."W{r-1}", "V1".  Cycles are
# reported starting from the lexicographically smallest vertex so output is
# deterministic and diffable.


def _vertex_sort_key(v: str) -> tuple[int, int]:
    if v == "V0":
        return (0, 0)
    if v == "V1":
        return (2, 0)
    return (1, int(v[1:]))


@dataclass(frozen=True)
class DiscontinuityGraph:
    """Functional digraph on {V0, W1..W{r-1}, V1} induced by a permutation.

    ``successor`` is a bijection of the vertex set (the graph is a disjoint
    union of cycles).  ``special`` holds exactly two edges: the one leaving
    V0 and the one entering V1.
    """

    r: int
    successor: dict[str, str]
    special: frozenset[tuple[str, str]]
    cycles: tuple[tuple[str, ...], ...] = field(init=False)

    def __post_init__(self):
        verts = set(self.successor)
        if verts != set(self.successor.values()):
            raise ValueError("successor is not a bijection of the vertex set")
        cycles = []
        seen: set[str] = set()
        for start in sorted(verts, key=_vertex_sort_key):
            if start in seen:
                continue
            cyc = [start]
            seen.add(start)
            v = self.successor[start]
            while v != start:
                cyc.append(v)
                seen.add(v)
                v = self.successor[v]
            cycles.append(tuple(cyc))
        object.__setattr__(self, "cycles", tuple(cycles))

    @property
    def vertices(self) -> tuple[str, ...]:
        return tuple(sorted(self.successor, key=_vertex_sort_key))

    def edges(self) -> list[tuple[str, str, bool]]:
        return [
            (v, self.successor[v], (v, self.successor[v]) in self.special)
            for v in self.vertices
        ]

    def special_count(self, cycle: Sequence[str]) -> int:
        n = 0
        for v in cycle:
            if (v, self.successor[v]) in self.special:
                n += 1
        return n

    def omega_count(self, cycle: Sequence[str]) -> int:
        """Number of distinct interior-endpoint vertices W_j on the cycle."""
        return sum(1 for v in cycle if v not in ("V0", "V1"))

    def cycle_of(self, vertex: str) -> tuple[str, ...]:
        for cyc in self.cycles:
            if vertex in cyc:
                return cyc
        raise KeyError(vertex)

    def has_one_special_cycle(self) -> bool:
        return any(self.special_count(c) == 1 for c in self.cycles)

    def to_json_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "edges": [
                {"from": a, "to": b, "special": s} for a, b, s in self.edges()
            ],
            "cycles": [
                {
                    "vertices": list(c),
                    "special_count": self.special_count(c),
                    "omega_count": self.omega_count(c),
                }
                for c in self.cycles
            ],
        }

    def to_json(self, indent: int | None = None) -> str:
        return json.dumps(self.to_json_dict(), indent=indent)

    def to_dot(self) -> str:
        lines = ["digraph endpoint_graph {"]
        for v in self.vertices:
            lines.append(f'  "{v}";')
        for a, b, s in self.edges():
            attr = ' [style=bold, color=red, label="special"]' if s else ""
            lines.append(f'  "{a}" -> "{b}"{attr};')
        lines.append("}")
        return "\n".join(lines)


def build_graph(p: Permutation) -> DiscontinuityGraph:
    """Build the endpoint digraph of an irreducible permutation.

    The successor map is purely combinatorial (no lengths enter):

    * V0   -> W(pi^{-1}(1) - 1), marked special,
    * W(j) -> V1 (special)              if pi(j) = r,
              V0                        if pi(j) + 1 = pi(1),
              W(pi^{-1}(pi(j)+1) - 1)   otherwise,
    * V1   -> V0                        if pi(r) + 1 = pi(1),
              W(pi^{-1}(pi(r)+1) - 1)   otherwise.

    The two middle cases encode which one-sided limits of the exchange map
    coincide; the V1 -> * edge is the endpoint identity in which the left
    limit at 1 equals a right limit (the case tables omit it, but it is
    forced by every vertex having out-degree one).
    """
    if not is_irreducible(p):
        raise ValueError(f"permutation {p} is reducible; graph undefined")
    r = p.r

    def w(j: int) -> str:
        return f"W{j}"

    successor: dict[str, str] = {}
    special: set[tuple[str, str]] = set()

    # pi^{-1}(1) > 1 and pi(r) < r hold for irreducible pi, so every W index
    # below is in {1..r-1}.
    first = w(p.inverse(1) - 1)
    successor["V0"] = first
    special.add(("V0", first))

    for j in range(1, r):
        if p(j) == r:
            successor[w(j)] = "V1"
            special.add((w(j), "V1"))
        elif p(j) + 1 == p(1):
            successor[w(j)] = "V0"
        else:
            successor[w(j)] = w(p.inverse(p(j) + 1) - 1)

    if p(r) + 1 == p(1):
        successor["V1"] = "V0"
    else:
        successor["V1"] = w(p.inverse(p(r) + 1) - 1)

    return DiscontinuityGraph(r=r, successor=successor, special=frozenset(special))


@dataclass(frozen=True)
class TypeWTrace:
    """Record of the index recursion deciding the Type W property.

    Starting from a_0 = 1, each step replaces a by pi^{-1}(pi(a) - 1) + 1
    until a hits pi^{-1}(1) (verdict True) or r + 1 (verdict False).
    """

    a: tuple[int, ...]
    s: int
    verdict: bool


def is_type_w(p: Permutation) -> TypeWTrace:
    """Run the Type W recursion and return its full trace.

    The walk visits each index at most once, so it terminates within r+1
    steps; a safety check enforces that.
    """
    if not is_irreducible(p):
        raise ValueError(f"permutation {p} is reducible; Type W undefined")
    r = p.r
    target = p.inverse(1)
    a = [1]
    while a[-1] not in (target, r + 1):
        if len(a) > r + 1:
            raise RuntimeError(f"Type W recursion failed to stop for {p}")
        a.append(p.inverse(p(a[-1]) - 1) + 1)
    return TypeWTrace(a=tuple(a), s=len(a) - 1, verdict=(a[-1] == target))


def cross_check_type_w(p: Permutation) -> bool:
    """True iff the recursion verdict agrees with the graph criterion.

    The graph criterion: the cycle of the endpoint graph through V0 has
    exactly one special edge.  The two are provably equivalent; this op
    exists to test that equivalence (and our implementation of both sides)
    over enumerations.
    """
    trace = is_type_w(p)
    g = build_graph(p)
    graph_verdict = g.special_count(g.cycle_of("V0")) == 1
    return trace.verdict == graph_verdict


def max_distinct_discontinuity_path(g: DiscontinuityGraph) -> int:
    """Maximum number of distinct W vertices visited by a directed path.

    The graph is a disjoint union of cycles, so a path can cover every
    vertex of its cycle and no more: the answer is the per-cycle maximum
    of the W-vertex count.
    """
    return max(g.omega_count(c) for c in g.cycles)


@dataclass(frozen=True)
class ClassificationReport:
    """Which sufficient conditions for empty AC spectrum apply to pi.

    Combinatorial facts about pi are paired with declared properties of a
    sampling function (see :class:`ietspec.sampling.FunctionMetadata`) to
    list the criteria that would apply to any exchange with these data and
    interval lengths satisfying the Keane condition.
    """

    permutation: tuple[int, ...]
    irreducible: bool
    rotation_class_k: Optional[int]
    type_w: bool
    cycle_special_counts: tuple[int, ...]
    max_distinct_path: int
    applicable_criteria: tuple[str, ...]
    topologically_weakly_mixing: bool
    topologically_prime: bool
    notes: tuple[str, ...]

    def to_json_dict(self) -> dict:
        return {
            "permutation": list(self.permutation),
            "irreducible": self.irreducible,
            "rotation_class_k": self.rotation_class_k,
            "type_w": self.type_w,
            "cycle_special_counts": list(self.cycle_special_counts),
            "max_distinct_path": self.max_distinct_path,
            "applicable_criteria": list(self.applicable_criteria),
            "topologically_weakly_mixing": self.topologically_weakly_mixing,
            "topologically_prime": self.topologically_prime,
            "notes": list(self.notes),
        }


def classify(p: Permutation, meta: "FunctionMetadata | None" = None) -> ClassificationReport:
    """Classify pi and decide which empty-AC-spectrum criteria apply.

    ``meta`` carries the declared sampling-function properties; pass None
    for a bare combinatorial report.  All verdicts presume interval lengths
    making the exchange satisfy the Keane condition; length-dependent facts
    cannot be decided here.
    """
    if not is_irreducible(p):
        raise ValueError(f"permutation {p} is reducible; classification undefined")
    g = build_graph(p)
    trace = is_type_w(p)
    rot = rotation_class(p)
    ell = max_distinct_discontinuity_path(g)
    counts = tuple(g.special_count(c) for c in g.cycles)

    criteria: list[str] = []
    notes: list[str] = []

    one_special = g.has_one_special_cycle()
    is_constant = bool(meta is not None and meta.is_constant)

    if meta is not None and is_constant:
        notes.append(
            "constant sampling function: potential is constant, spectrum is "
            "purely absolutely continuous; no emptiness criterion can apply"
        )
    else:
        if one_special:
            criteria.append(
                "one-special-edge cycle: AC spectrum empty for every "
                "non-constant continuous sampling function (Keane lengths)"
            )
        if meta is not None and meta.level_set_bound is not None:
            if meta.level_set_bound <= ell - 1:
                criteria.append(
                    f"preimage-cardinality: level sets have at most "
                    f"{meta.level_set_bound} <= {ell} - 1 points and some cycle "
                    f"carries {ell} distinct discontinuities; AC spectrum empty "
                    "(Keane lengths)"
                )
            else:
                notes.append(
                    f"level-set bound {meta.level_set_bound} exceeds "
                    f"max-distinct-path - 1 = {ell - 1}; preimage criterion "
                    "does not apply"
                )
        if meta is not None and meta.lipschitz_constant is not None:
            if rot is None:
                criteria.append(
                    "lipschitz + weak mixing: AC spectrum empty whenever the "
                    "exchange is measure-theoretically weakly mixing (holds for "
                    "a.e. lengths when pi is not of rotation class)"
                )
            else:
                notes.append(
                    "rotation-class pi is never weakly mixing; the Lipschitz "
                    "criterion cannot apply"
                )
        if meta is not None and meta.nondegenerate_extremum is not None:
            if rot is None:
                criteria.append(
                    "non-degenerate extremum + C^1: AC spectrum empty for "
                    "Keane lengths (covers lambda*cos(2*pi*x) potentials)"
                )
            else:
                notes.append(
                    "rotation-class pi: the non-degenerate-extremum criterion "
                    "requires a non-rotation exchange"
                )
        if not criteria:
            notes.append(
                "no combinatorial criterion applies; spectral verdict requires "
                "a dynamics-level scan of the composed powers"
            )

    return ClassificationReport(
        permutation=p.image,
        irreducible=True,
        rotation_class_k=rot,
        type_w=trace.verdict,
        cycle_special_counts=counts,
        max_distinct_path=ell,
        applicable_criteria=tuple(criteria),
        topologically_weakly_mixing=trace.verdict,
        topologically_prime=trace.verdict,
        notes=tuple(notes),
    )


def irreducible_permutations(r: int) -> Iterator[Permutation]:
    """All irreducible permutations of {1..r}, in lexicographic order."""
    for image in itertools.permutations(range(1, r + 1)):
        p = Permutation(image)
        if is_irreducible(p):
            yield p
