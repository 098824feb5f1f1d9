import itertools
import json

import pytest

from ietspec.permutation import (
    ClassificationReport,
    Permutation,
    build_graph,
    classify,
    cross_check_type_w,
    irreducible_permutations,
    is_irreducible,
    is_type_w,
    max_distinct_discontinuity_path,
    parse_permutation,
    reversal,
    rotation_class,
    rotation_permutation,
)
from ietspec.sampling import FunctionMetadata, cosine


def brute_force_irreducible(image):
    r = len(image)
    for k in range(1, r):
        if set(image[:k]) == set(range(1, k + 1)):
            return False
    return True


class TestPermutationType:
    def test_valid(self):
        p = Permutation((3, 1, 2))
        assert p.r == 3
        assert p(1) == 3 and p.inverse(3) == 1

    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation((1, 1, 3))

    def test_rejects_r1(self):
        with pytest.raises(ValueError):
            Permutation((1,))

    def test_parse(self):
        assert parse_permutation("3 2 1").image == (3, 2, 1)
        assert parse_permutation("2,1").image == (2, 1)

    def test_parse_error_position(self):
        with pytest.raises(ValueError, match="position 1"):
            parse_permutation("3 x 1")


class TestIrreducible:
    def test_identity_reducible(self):
        assert not is_irreducible(Permutation((1, 2, 3)))

    def test_reversal_irreducible(self):
        assert is_irreducible(reversal(3))

    def test_swap(self):
        assert is_irreducible(Permutation((2, 1)))

    def test_brute_force_agreement(self):
        for r in range(2, 7):
            for image in itertools.permutations(range(1, r + 1)):
                p = Permutation(image)
                assert is_irreducible(p) == brute_force_irreducible(image)


class TestRotationClass:
    def test_swap_is_k0(self):
        assert rotation_class(Permutation((2, 1))) == 0

    def test_reversal3_is_none(self):
        assert rotation_class(reversal(3)) is None

    def test_identity_is_r_minus_1(self):
        assert rotation_class(Permutation((1, 2, 3))) == 2

    def test_recognizes_all_rotations(self):
        for r in range(2, 8):
            for k in range(r):
                assert rotation_class(rotation_permutation(r, k)) == k


class TestGraph:
    def test_reversal3_two_cycles_one_special_each(self):
        g = build_graph(reversal(3))
        assert len(g.cycles) == 2
        assert sorted(g.cycles) == [("V0", "W2"), ("W1", "V1")]
        assert [g.special_count(c) for c in g.cycles] == [1, 1]

    def test_swap_single_cycle_two_specials(self):
        g = build_graph(Permutation((2, 1)))
        assert g.cycles == (("V0", "W1", "V1"),)
        assert g.special_count(g.cycles[0]) == 2

    def test_reducible_rejected(self):
        with pytest.raises(ValueError, match="reducible"):
            build_graph(Permutation((1, 2, 3)))

    def test_successor_bijection_and_special_shape(self):
        for r in range(2, 8):
            for p in irreducible_permutations(r):
                g = build_graph(p)
                verts = set(g.successor)
                assert len(verts) == r + 1
                assert set(g.successor.values()) == verts
                assert len(g.special) == 2
                starts = {a for a, _ in g.special}
                ends = {b for _, b in g.special}
                assert "V0" in starts and "V1" in ends

    def test_rotation_class_cycles_have_0_or_2_specials(self):
        for r in range(2, 8):
            for k in range(r):
                p = rotation_permutation(r, k)
                if not is_irreducible(p):
                    continue
                g = build_graph(p)
                assert all(g.special_count(c) in (0, 2) for c in g.cycles)

    def test_reversal_odd_r_two_cycles(self):
        for r in (3, 5, 7):
            g = build_graph(reversal(r))
            assert len(g.cycles) == 2
            assert all(g.special_count(c) == 1 for c in g.cycles)

    def test_json_and_dot(self):
        g = build_graph(reversal(3))
        d = json.loads(g.to_json())
        assert set(d) == {"vertices", "edges", "cycles"}
        assert {"from": "V0", "to": "W2", "special": True} in d["edges"]
        assert all(set(c) == {"vertices", "special_count", "omega_count"} for c in d["cycles"])
        dot = g.to_dot()
        assert '"V0" -> "W2"' in dot and "digraph" in dot


class TestTypeW:
    def test_reversal3(self):
        t = is_type_w(reversal(3))
        assert t.a == (1, 3) and t.s == 1 and t.verdict

    def test_swap(self):
        t = is_type_w(Permutation((2, 1)))
        assert t.a == (1, 3) and t.s == 1 and not t.verdict

    def test_reversal4(self):
        t = is_type_w(reversal(4))
        assert t.a == (1, 3, 5) and not t.verdict

    def test_reducible_rejected(self):
        with pytest.raises(ValueError):
            is_type_w(Permutation((1, 2)))

    def test_trace_distinct_and_short(self):
        for r in range(2, 7):
            for p in irreducible_permutations(r):
                t = is_type_w(p)
                assert len(t.a) <= r + 1
                assert len(set(t.a)) == len(t.a)

    def test_cross_check_exhaustive(self):
        for r in range(2, 7):
            for p in irreducible_permutations(r):
                assert cross_check_type_w(p)


class TestMaxDistinctPath:
    def test_reversal3(self):
        assert max_distinct_discontinuity_path(build_graph(reversal(3))) == 1

    def test_swap(self):
        assert max_distinct_discontinuity_path(build_graph(Permutation((2, 1)))) == 1

    def test_rotation_r5_k2(self):
        g = build_graph(rotation_permutation(5, 2))
        assert max_distinct_discontinuity_path(g) == 1

    def test_reversal5(self):
        assert max_distinct_discontinuity_path(build_graph(reversal(5))) == 2


class TestClassify:
    def test_reversal5_continuous_nonconstant(self):
        rep = classify(reversal(5), cosine(1.0).metadata)
        assert isinstance(rep, ClassificationReport)
        assert rep.type_w
        assert any("one-special-edge" in c for c in rep.applicable_criteria)

    def test_swap_lipschitz_no_criterion(self):
        meta = FunctionMetadata(lipschitz_constant=5.0, is_constant=False)
        rep = classify(Permutation((2, 1)), meta)
        assert rep.rotation_class_k == 0
        assert rep.applicable_criteria == ()
        assert any("dynamics-level scan" in n for n in rep.notes)

    def test_reversal3_injective_preimage_criterion_needs_ell_2(self):
        meta = FunctionMetadata(level_set_bound=1, is_constant=False)
        rep = classify(reversal(3), meta)
        # max distinct path is 1, so the preimage criterion needs bound <= 0
        assert rep.max_distinct_path == 1
        assert not any("preimage" in c for c in rep.applicable_criteria)
        assert any("one-special-edge" in c for c in rep.applicable_criteria)

    def test_reversal5_injective_preimage_applies(self):
        meta = FunctionMetadata(level_set_bound=1, is_constant=False)
        rep = classify(reversal(5), meta)
        assert rep.max_distinct_path == 2
        assert any("preimage" in c for c in rep.applicable_criteria)

    def test_nondegenerate_extremum_path(self):
        rep = classify(reversal(3), cosine(1.0).metadata)
        assert any("extremum" in c for c in rep.applicable_criteria)
        rot = classify(Permutation((2, 1)), cosine(1.0).metadata)
        assert not any("extremum" in c for c in rot.applicable_criteria)

    def test_constant_function_no_criteria(self):
        meta = FunctionMetadata(is_constant=True)
        rep = classify(reversal(3), meta)
        assert rep.applicable_criteria == ()
        assert any("purely absolutely continuous" in n for n in rep.notes)

    def test_type_w_gives_topological_flags(self):
        rep = classify(reversal(3), None)
        assert rep.topologically_weakly_mixing and rep.topologically_prime
        rep2 = classify(Permutation((2, 1)), None)
        assert not rep2.topologically_weakly_mixing
