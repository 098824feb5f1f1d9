import math

import pytest
from mpmath import mp, mpf

from ietspec.gordon import (
    ContinuedFraction,
    GrowthSpec,
    build_liouville_rotation,
    continued_fraction_of,
    find_return_times,
    gordon_certificate,
    gordon_sup_diff,
    liouville_gordon_certificate,
)
from ietspec.iet import golden_rotation, rotation_iet
from ietspec.sampling import constant, cosine
from ietspec.spectral import potential

GOLDEN = (5 ** 0.5 - 1) / 2
FIB = [1, 2, 3, 5, 8, 13, 21, 34, 55, 89]


class TestContinuedFraction:
    def test_golden_all_ones(self):
        cf = continued_fraction_of(GOLDEN, 12)
        assert cf.quotients == (1,) * 12
        assert [q for _, q in cf.convergents()] == FIB + [144, 233]

    def test_identity_exact(self):
        cf = ContinuedFraction((7, 15, 1, 292, 1, 1, 1, 2))  # pi's tail
        assert all(d == 0 for d in cf.identity_defects())

    def test_value_round_trip(self):
        cf = continued_fraction_of(GOLDEN, 40)
        assert abs(float(cf.value(60)) - GOLDEN) < 1e-15

    def test_convergent_quality(self):
        cf = continued_fraction_of(GOLDEN, 20)
        convs = cf.convergents()
        with mp.workdps(60):
            alpha = (mp.sqrt(5) - 1) / 2
            for (p, q), (_, q_next) in zip(convs, convs[1:]):
                assert abs(alpha - mpf(p) / q) < mpf(1) / (q * q_next)

    def test_text_round_trip(self):
        cf = ContinuedFraction((1, 2, 3))
        assert cf.to_text() == "[0; 1, 2, 3]"
        assert ContinuedFraction.from_text("[0; 1, 2, 3]") == cf

    def test_rejects_bad_quotients(self):
        with pytest.raises(ValueError):
            ContinuedFraction((1, 0, 2))


class TestGordonSupDiff:
    def test_periodic_potential_zero(self):
        t = rotation_iet(0.4)  # rational 2/5: orbits are 5-periodic
        v = potential(t, cosine(1.0), 0.1, -5, 10)
        assert gordon_sup_diff(v, 5) < 1e-14

    def test_constant_zero_any_q(self):
        v = potential(golden_rotation(), constant(2.0), 0.0, -8, 16)
        assert gordon_sup_diff(v, 8) == 0.0

    def test_window_too_small(self):
        v = potential(golden_rotation(), cosine(1.0), 0.0, -3, 10)
        with pytest.raises(ValueError, match="window"):
            gordon_sup_diff(v, 5)

    def test_lipschitz_chaining_bound(self):
        t = golden_rotation()
        f = cosine(1.0)
        v = potential(t, f, 0.0, -89, 178)
        s = gordon_sup_diff(v, 89)
        norm = abs(89 * GOLDEN - round(89 * GOLDEN))
        assert s <= 2 * math.pi * norm + 1e-12


class TestFindReturnTimes:
    def test_golden_fibonacci_dominate(self):
        best = find_return_times(golden_rotation(), 0.0, 100, 4)
        assert all(q in FIB + [144] for q, _ in best)
        assert best[0][0] == 89

    def test_rational_rotation_exact_zero(self):
        rt = dict(find_return_times(rotation_iet(0.4), 0.1, 12, 12))
        assert rt[5] < 1e-14
        assert rt[10] < 1e-14

    def test_sorted_by_displacement(self):
        rt = find_return_times(golden_rotation(), 0.3, 50, 10)
        ds = [d for _, d in rt]
        assert ds == sorted(ds)

    def test_q_max_validation(self):
        with pytest.raises(ValueError):
            find_return_times(golden_rotation(), 0.0, 1)


class TestGrowthSpec:
    def test_text_round_trip(self):
        g = GrowthSpec.from_text("exp:3")
        assert g.kind == "exp" and g.rate == 3.0
        assert GrowthSpec.from_text(g.to_text()) == g

    def test_log10(self):
        g = GrowthSpec("exp", 3.0)
        assert float(g.log10_at(10)) == pytest.approx(-30 * math.log10(math.e))
        p = GrowthSpec("power", 2.0)
        assert float(p.log10_at(100)) == pytest.approx(-4.0)

    def test_rejects_bad(self):
        with pytest.raises(ValueError):
            GrowthSpec("garbage", 1.0)


class TestBuildLiouville:
    def test_exp3_structure(self):
        rot = build_liouville_rotation(GrowthSpec("exp", 3.0), 3, dps=220)
        assert rot.cf.quotients[0] == 21
        assert len(str(rot.cf.quotients[1])) == 28
        assert 0 < float(rot.alpha) < 1
        lv1, lv2, lv3 = rot.levels
        assert lv1.q == 21 and lv1.verified == "cf-exact"
        assert lv1.displacement_log10 is not None
        assert lv1.displacement_log10 <= lv1.target_log10
        assert lv2.q is not None and lv2.verified == "greedy-bound"
        assert lv3.q is None and float(lv3.log10_q) > 1e28

    def test_level1_reverifies_by_direct_orbit(self):
        rot = build_liouville_rotation(GrowthSpec("exp", 3.0), 2, dps=220)
        q = rot.levels[0].q
        with mp.workdps(220):
            alpha = rot.alpha
            worst = mpf(0)
            for j in range(q):
                xj = mp.frac(j * alpha)
                up = mp.frac((j + q) * alpha)
                dn = mp.frac((j - q) * alpha)
                for other in (up, dn):
                    d = abs(xj - other)
                    worst = max(worst, min(d, 1 - d))
            assert worst <= mp.exp(-3 * q)

    def test_power_growth_all_exact(self):
        rot = build_liouville_rotation(GrowthSpec("power", 2.0), 4, dps=80)
        assert all(lv.q is not None for lv in rot.levels)
        assert all(lv.verified == "cf-exact" for lv in rot.levels)
        for lv in rot.levels:
            assert lv.displacement_log10 <= lv.target_log10 + 1e-12

    def test_kmax1_trivial(self):
        rot = build_liouville_rotation(GrowthSpec("exp", 1.0), 1, dps=50)
        assert len(rot.levels) == 1
        assert rot.levels[0].q == rot.cf.convergents()[0][1]

    def test_kmax_guard(self):
        with pytest.raises(ValueError):
            build_liouville_rotation(GrowthSpec("exp", 3.0), 9)

    def test_json_dict(self):
        rot = build_liouville_rotation(GrowthSpec("power", 2.0), 3, dps=60)
        d = rot.to_json_dict()
        assert set(d) == {"alpha_digits", "continued_fraction", "growth", "dps", "levels"}
        assert len(d["levels"]) == 3


class TestCertificates:
    def test_liouville_exp3_c2(self):
        rot = build_liouville_rotation(GrowthSpec("exp", 3.0), 3, dps=220)
        cert = liouville_gordon_certificate(rot, cosine(1.0), [2.0])
        prods = cert.product_log10[2.0]
        assert all(p < -6 for p in prods)  # s_k e^{2 q_k} <= 1e-6
        assert all(b < a for a, b in zip(prods, prods[1:]))
        assert cert.verdicts[2.0]
        assert cert.sup_diffs[0] is not None and cert.sup_diffs[0] < 1e-20

    def test_liouville_fails_above_rate(self):
        rot = build_liouville_rotation(GrowthSpec("exp", 3.0), 3, dps=220)
        cert = liouville_gordon_certificate(rot, cosine(1.0), [4.0])
        assert not cert.verdicts[4.0]

    def test_golden_fails_c1(self):
        cert = gordon_certificate(golden_rotation(), cosine(1.0), 0.0, [13, 89, 610], [1.0])
        assert not cert.verdicts[1.0]
        assert cert.chaining_ok

    def test_constant_passes_everything(self):
        cert = gordon_certificate(golden_rotation(), constant(1.0), 0.0, [3, 8], [1.0, 5.0])
        assert cert.verdicts[1.0] and cert.verdicts[5.0]
        assert all(s == 0.0 for s in cert.sup_diffs)

    def test_qs_must_increase(self):
        with pytest.raises(ValueError):
            gordon_certificate(golden_rotation(), cosine(1.0), 0.0, [8, 8], [1.0])

    def test_json_serializes_huge_exponents(self):
        import json

        rot = build_liouville_rotation(GrowthSpec("exp", 3.0), 3, dps=220)
        cert = liouville_gordon_certificate(rot, cosine(1.0), [2.0])
        text = json.dumps(cert.to_json_dict())
        assert "alpha_digits" in text
        assert json.loads(text)["C_verdicts"]["2.0"] is True
