"""Backend parity: the compiled kernels and the pure-Python twins must agree."""

import numpy as np
import pytest

from ietspec import kernels
from ietspec.iet import Iet, golden_rotation
from ietspec.permutation import reversal

HAVE_CYTHON = "cython" in kernels.available_backends()

pytestmark = pytest.mark.skipif(not HAVE_CYTHON, reason="compiled backend not built")


@pytest.fixture(scope="module")
def backends():
    return kernels.get_impl("cython"), kernels.get_impl("python")


def sampler_cases():
    return [
        (0, np.array([2.5]), np.array([])),
        (1, np.array([1.5]), np.array([])),
        (2, np.array([0.3, 1.0, -0.2]), np.array([0.7, 0.1])),
        (3, np.array([0.0, 0.3, 1.0]), np.array([0.0, 1.0, -1.0])),
        (4, np.array([0.0, 0.5, 1.0]), np.array([1.0, -1.0])),
    ]


def iet_cases():
    lam = [0.2 + 2 ** 0.5 * 1e-3, 0.3 + 3 ** 0.5 * 1e-3]
    return [
        golden_rotation(),
        Iet.make(reversal(3), lam + [1.0 - sum(lam)]),
        Iet.make(reversal(5), [0.11, 0.23, 0.17, 0.29, 0.2]),
    ]


class TestParity:
    def test_eval_sampler(self, backends):
        cy, py = backends
        xs = np.linspace(0, 0.9999, 331)
        for kind, a, b in sampler_cases():
            for x in xs:
                assert cy.eval_sampler(kind, a, b, float(x)) == pytest.approx(
                    py.eval_sampler(kind, a, b, float(x)), abs=1e-15
                )

    def test_orbit_fill(self, backends):
        cy, py = backends
        for t in iet_cases():
            lefts, offsets = kernels.iet_arrays(t)
            oc = np.empty(2000)
            op = np.empty(2000)
            wc = cy.orbit_fill(lefts, offsets, 0.1234, oc)
            wp = py.orbit_fill(lefts, offsets, 0.1234, op)
            assert wc == wp
            assert np.array_equal(oc, op)

    def test_potential_fill(self, backends):
        cy, py = backends
        t = iet_cases()[1]
        lefts, offsets = kernels.iet_arrays(t)
        for kind, a, b in sampler_cases():
            oc = np.empty(500)
            op = np.empty(500)
            cy.potential_fill(lefts, offsets, kind, a, b, 0.4321, oc)
            py.potential_fill(lefts, offsets, kind, a, b, 0.4321, op)
            assert np.allclose(oc, op, rtol=0, atol=1e-14)

    def test_cocycle_accumulate(self, backends):
        cy, py = backends
        t = golden_rotation()
        lefts, offsets = kernels.iet_arrays(t)
        a = np.array([1.0])
        b = np.array([])
        for energy in (0.0, 1.3, 3.0):
            rc = cy.cocycle_accumulate(lefts, offsets, 1, a, b, 0.25, energy, 5000)
            rp = py.cocycle_accumulate(lefts, offsets, 1, a, b, 0.25, energy, 5000)
            assert rc[0] == pytest.approx(rp[0], rel=1e-12, abs=1e-12)
            for xc, xp in zip(rc[1:], rp[1:]):
                assert xc == pytest.approx(xp, rel=1e-10, abs=1e-12)

    def test_sturm_counts(self, backends):
        cy, py = backends
        rng = np.random.default_rng(7)
        diag = rng.uniform(-2, 2, 300)
        probes = rng.uniform(-4.5, 4.5, 97)
        assert np.array_equal(cy.sturm_counts(diag, probes), py.sturm_counts(diag, probes))


class TestSelection:
    def test_active_backend_reported(self):
        assert kernels.BACKEND in ("cython", "python")

    def test_get_impl_rejects_unknown(self):
        with pytest.raises(ValueError):
            kernels.get_impl("fortran")

    def test_force_python_env(self):
        import subprocess
        import sys

        code = (
            "import os; os.environ['IETSPEC_FORCE_PYTHON_KERNELS']='1'; "
            "from ietspec import kernels; print(kernels.BACKEND)"
        )
        out = subprocess.run(
            [sys.executable, "-c", code],
            capture_output=True,
            text=True,
            env={"PATH": "/usr/bin:/bin", "PYTHONPATH": "src"},
            cwd=".",
        )
        assert out.stdout.strip() == "python"
