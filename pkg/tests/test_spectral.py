import math

import numpy as np
import pytest

from ietspec.iet import Iet, golden_rotation
from ietspec.permutation import reversal
from ietspec.sampling import constant, cosine
from ietspec.spectral import (
    SpectrumApprox,
    ac_indicator,
    apply_operator,
    cocycle_product,
    lyapunov,
    lyapunov_grid,
    potential,
    spectrum_hausdorff,
    sturm_count_below,
    transfer_step,
    tridiagonal_eigenvalues,
    truncated_spectrum,
)

GOLDEN = (5 ** 0.5 - 1) / 2
L3 = math.log((3 + 5 ** 0.5) / 2)

ZERO = constant(0.0)


def rev3_keane():
    lam = [0.2 + 2 ** 0.5 * 1e-3, 0.3 + 3 ** 0.5 * 1e-3]
    return Iet.make(reversal(3), lam + [1.0 - sum(lam)])


class TestPotential:
    def test_constant(self):
        v = potential(golden_rotation(), constant(1.5), 0.2, -3, 4)
        assert np.allclose(v.values, 1.5)

    def test_golden_cosine_matches_formula(self):
        v = potential(golden_rotation(), cosine(2.0), 0.0, 0, 6)
        expected = [2 * math.cos(2 * math.pi * ((n * GOLDEN) % 1.0)) for n in range(6)]
        assert v.values == pytest.approx(expected, abs=1e-12)

    def test_negative_window(self):
        t = golden_rotation()
        v = potential(t, cosine(1.0), 0.3, -5, 5)
        w = potential(t, cosine(1.0), 0.3, 0, 5)
        assert v.values[5:] == pytest.approx(w.values)

    def test_empty_window(self):
        v = potential(golden_rotation(), ZERO, 0.0, 2, 2)
        assert len(v) == 0 and len(v.values) == 0

    def test_value_bounds_check(self):
        v = potential(golden_rotation(), ZERO, 0.0, 0, 3)
        with pytest.raises(IndexError):
            v.value(3)


class TestApplyOperator:
    def test_free_delta(self):
        v = potential(golden_rotation(), ZERO, 0.0, -5, 6)
        psi = np.zeros(11)
        psi[5] = 1.0
        out = apply_operator(v, psi)
        expected = np.zeros(11)
        expected[4] = expected[6] = 1.0
        assert out == pytest.approx(expected)

    def test_constant_adds_linear_part(self):
        v = potential(golden_rotation(), constant(2.0), 0.0, 0, 8)
        rng = np.random.default_rng(1)
        psi = rng.standard_normal(8)
        free = potential(golden_rotation(), ZERO, 0.0, 0, 8)
        assert apply_operator(v, psi) == pytest.approx(apply_operator(free, psi) + 2.0 * psi)

    def test_plane_wave_eigenrelation(self):
        k = 0.7
        n = np.arange(400)
        psi = np.sin(k * n)
        v = potential(golden_rotation(), ZERO, 0.0, 0, 400)
        out = apply_operator(v, psi)
        interior = slice(50, 350)
        assert out[interior] == pytest.approx(2 * math.cos(k) * psi[interior], abs=1e-9)

    def test_window_mismatch(self):
        v = potential(golden_rotation(), ZERO, 0.0, 0, 5)
        with pytest.raises(ValueError):
            apply_operator(v, np.zeros(6))


class TestTransferStep:
    def test_zero_energy_rotation(self):
        m = transfer_step(1.0, 1.0)
        assert m == pytest.approx(np.array([[0.0, -1.0], [1.0, 0.0]]))
        assert np.linalg.norm(m, 2) == pytest.approx(1.0)

    def test_spectral_radius_at_three(self):
        m = transfer_step(3.0, 0.0)
        ev = np.linalg.eigvals(m)
        assert np.abs(ev).max() == pytest.approx((3 + 5 ** 0.5) / 2)

    def test_det_exactly_one(self):
        for e, v in ((0.0, 0.0), (3.7, -1.2), (100.0, 99.5)):
            a = transfer_step(e, v)
            assert a[0, 0] * a[1, 1] - a[0, 1] * a[1, 0] == 1.0


class TestCocycleProduct:
    def test_free_elliptic_quotient_small(self):
        cp = cocycle_product(golden_rotation(), ZERO, 0.3, 0.0, 10_000)
        assert abs(cp.quotient()) < 1e-3

    def test_free_hyperbolic_quotient(self):
        cp = cocycle_product(golden_rotation(), ZERO, 0.3, 3.0, 10_000)
        assert cp.quotient() == pytest.approx(L3, abs=1e-3)

    def test_det_drift_elliptic_long(self):
        cp = cocycle_product(golden_rotation(), ZERO, 0.3, 0.5, 10 ** 6)
        assert abs(cp.det_drift_log()) < 1e-9

    def test_det_drift_am_in_spectrum_long(self):
        t = golden_rotation()
        f = cosine(1.0)
        v = potential(t, f, 0.3, 0, 500)
        e_mid = float(truncated_spectrum(v, 500).eigenvalues[250])
        cp = cocycle_product(t, f, 0.3, e_mid, 10 ** 6)
        assert abs(cp.det_drift_log()) < 1e-9

    def test_det_drift_hyperbolic_short(self):
        for n in (4, 8, 12):
            cp = cocycle_product(golden_rotation(), ZERO, 0.3, 3.0, n)
            assert abs(cp.det_drift_log()) < 1e-9

    def test_log_norm_nondecreasing_outside_spectrum_bound(self):
        t = golden_rotation()
        f = cosine(1.0)
        prev = 0.0
        for n in (16, 64, 256, 1024, 4096):
            cp = cocycle_product(t, f, 0.3, 5.0, n)  # |E| > 2 + sup|f| = 3
            assert cp.log_norm >= prev - 1e-12
            prev = cp.log_norm

    def test_rejects_zero_steps(self):
        with pytest.raises(ValueError):
            cocycle_product(golden_rotation(), ZERO, 0.3, 0.0, 0)


class TestLyapunov:
    def test_free_zero_energy(self):
        est = lyapunov(golden_rotation(), ZERO, 0.0, 10 ** 5, 2, 42)
        assert abs(est.mean) <= 1e-3

    def test_free_e3(self):
        est = lyapunov(golden_rotation(), ZERO, 3.0, 10 ** 6, 2, 42)
        assert est.mean == pytest.approx(L3, abs=2e-3)

    def test_nonnegative_means(self):
        t = rev3_keane()
        ests = lyapunov_grid(t, cosine(1.0), np.linspace(-3, 3, 13), 10 ** 4, 1, 9)
        assert all(e.mean >= -1e-3 for e in ests)

    def test_reproducible(self):
        a = lyapunov(golden_rotation(), cosine(1.0), 0.5, 10 ** 4, 3, 77)
        b = lyapunov(golden_rotation(), cosine(1.0), 0.5, 10 ** 4, 3, 77)
        assert a == b

    def test_inverse_exchange_symmetry(self):
        # the cocycle over the inverse dynamics has the same exponent
        t = rev3_keane()
        f = cosine(1.0)
        e = 2.2
        a = lyapunov(t, f, e, 10 ** 5, 8, 5)
        b = lyapunov(t.inverse_exchange(), f, e, 10 ** 5, 8, 5)
        tol = 3 * max(a.stderr + b.stderr, 1e-3)
        assert abs(a.mean - b.mean) <= tol


class TestLyapunovGrid:
    def test_single_point_matches_lyapunov(self):
        from ietspec.spectral import _point_seed

        t = golden_rotation()
        f = cosine(1.0)
        grid = lyapunov_grid(t, f, [0.7], 10 ** 4, 2, 11)
        direct = lyapunov(t, f, 0.7, 10 ** 4, 2, _point_seed(11, 0.7))
        assert grid[0].mean == direct.mean and grid[0].stderr == direct.stderr

    def test_permutation_invariance(self):
        t = golden_rotation()
        f = cosine(1.0)
        es = [0.1, 0.9, -1.3, 2.2]
        a = lyapunov_grid(t, f, es, 10 ** 4, 2, 3)
        b = lyapunov_grid(t, f, es[::-1], 10 ** 4, 2, 3)
        assert [x.mean for x in a] == [x.mean for x in b[::-1]]

    def test_thread_determinism(self):
        t = golden_rotation()
        f = cosine(1.0)
        es = np.linspace(-2, 2, 9)
        a = lyapunov_grid(t, f, es, 10 ** 4, 2, 3, threads=1)
        b = lyapunov_grid(t, f, es, 10 ** 4, 2, 3, threads=8)
        assert a == b

    def test_hyperbolic_grid_positive(self):
        f = cosine(1.0)
        sup = 1.0
        es = [2 + sup + 0.5, -(2 + sup + 0.5), 2 + sup + 2.0]
        ests = lyapunov_grid(golden_rotation(), f, es, 10 ** 4, 1, 5)
        assert all(e.mean > 0.1 for e in ests)

    def test_empty_grid_rejected(self):
        with pytest.raises(ValueError):
            lyapunov_grid(golden_rotation(), ZERO, [], 100, 1, 0)


class TestTruncatedSpectrum:
    def test_m1(self):
        v = potential(golden_rotation(), constant(2.5), 0.0, 0, 1)
        assert truncated_spectrum(v, 1).eigenvalues == pytest.approx([2.5])

    def test_m2_free(self):
        v = potential(golden_rotation(), ZERO, 0.0, 0, 2)
        assert truncated_spectrum(v, 2).eigenvalues == pytest.approx([-1.0, 1.0], abs=1e-10)

    def test_m200_free_closed_form(self):
        v = potential(golden_rotation(), ZERO, 0.0, 0, 200)
        got = truncated_spectrum(v, 200).eigenvalues
        expected = np.sort(2 * np.cos(np.arange(1, 201) * np.pi / 201))
        assert np.abs(got - expected).max() < 1e-10

    def test_invalid_m(self):
        v = potential(golden_rotation(), ZERO, 0.0, 0, 5)
        with pytest.raises(ValueError):
            truncated_spectrum(v, 0)

    def test_window_must_cover(self):
        v = potential(golden_rotation(), ZERO, 0.0, 0, 5)
        with pytest.raises(IndexError):
            truncated_spectrum(v, 6)

    def test_gershgorin(self):
        v = potential(rev3_keane(), cosine(1.7), 0.123, 0, 300)
        ev = truncated_spectrum(v, 300).eigenvalues
        assert ev[0] >= v.values[:300].min() - 2 - 1e-9
        assert ev[-1] <= v.values[:300].max() + 2 + 1e-9

    def test_strictly_increasing_free(self):
        v = potential(golden_rotation(), ZERO, 0.0, 0, 50)
        ev = truncated_spectrum(v, 50).eigenvalues
        assert np.all(np.diff(ev) > 0)

    def test_interlacing(self):
        v = potential(golden_rotation(), cosine(1.0), 0.3, 0, 501)
        for m in (100, 250, 500):
            small = truncated_spectrum(v, m).eigenvalues
            big = truncated_spectrum(v, m + 1).eigenvalues
            assert np.all(big[:-1] <= small + 1e-9)
            assert np.all(small <= big[1:] + 1e-9)

    def test_sturm_count_self_consistency(self):
        v = potential(rev3_keane(), cosine(1.0), 0.2, 0, 400)
        sa = truncated_spectrum(v, 400)
        rng = np.random.default_rng(17)
        for x in rng.uniform(-3.5, 3.5, 100):
            if np.abs(sa.eigenvalues - x).min() < 1e-8:
                continue
            assert sturm_count_below(v, 400, float(x)) == int(np.sum(sa.eigenvalues < x))


class TestHausdorff:
    def test_identical_sets(self):
        v = potential(golden_rotation(), cosine(1.0), 0.3, 0, 50)
        sa = truncated_spectrum(v, 50)
        assert spectrum_hausdorff(sa, sa) == 0.0

    def test_disjoint_singletons(self):
        a = SpectrumApprox(1, 0.0, np.array([0.0]))
        b = SpectrumApprox(1, 0.0, np.array([3.0]))
        assert spectrum_hausdorff(a, b) == 3.0

    def test_invalid_spectrum(self):
        with pytest.raises(ValueError):
            SpectrumApprox(0, 0.0, np.array([]))


class TestAcIndicator:
    def test_free_spectrum_reads_ac(self):
        v = potential(golden_rotation(), ZERO, 0.0, 0, 500)
        sa = truncated_spectrum(v, 500)
        grid = np.linspace(-2.1, 2.1, 100)
        ests = lyapunov_grid(golden_rotation(), ZERO, grid, 10 ** 4, 1, 0)
        rep = ac_indicator(ests, sa, tau=0.01)
        assert rep.n_adjacent > 50
        assert rep.fraction_low > 0.95
        assert rep.grid_covers_spectrum
        assert "evidence" in rep.disclaimer

    def test_no_estimates_rejected(self):
        v = potential(golden_rotation(), ZERO, 0.0, 0, 10)
        with pytest.raises(ValueError):
            ac_indicator([], truncated_spectrum(v, 10))


class TestTridiagonalOracle:
    def test_random_diagonals_against_dense_eig(self):
        rng = np.random.default_rng(4)
        for _ in range(5):
            m = int(rng.integers(2, 40))
            d = rng.uniform(-2, 2, m)
            got = tridiagonal_eigenvalues(d)
            dense = np.diag(d) + np.diag(np.ones(m - 1), 1) + np.diag(np.ones(m - 1), -1)
            expected = np.sort(np.linalg.eigvalsh(dense))
            assert np.abs(got - expected).max() < 1e-9
