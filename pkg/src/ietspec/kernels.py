"""Kernel backend selection.

Prefers the compiled extension, falls back to the pure-Python twin.  Set
``IETSPEC_FORCE_PYTHON_KERNELS=1`` to force the fallback (used by the
parity tests and the benchmark).
"""

from __future__ import annotations

import os

import numpy as np

if os.environ.get("IETSPEC_FORCE_PYTHON_KERNELS", "") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl  # type: ignore[attr-defined]
    except ImportError:
        from . import _kernels_py as _impl

BACKEND: str = _impl.BACKEND

eval_sampler = _impl.eval_sampler
orbit_fill = _impl.orbit_fill
potential_fill = _impl.potential_fill
cocycle_accumulate = _impl.cocycle_accumulate
sturm_counts = _impl.sturm_counts


def available_backends() -> list[str]:
    names = ["python"]
    try:
        from . import _kernels  # noqa: F401

        names.insert(0, "cython")
    except ImportError:
        pass
    return names


def get_impl(name: str):
    """Fetch a specific backend module by name ("cython" or "python")."""
    if name == "python":
        from . import _kernels_py

        return _kernels_py
    if name == "cython":
        from . import _kernels

        return _kernels
    raise ValueError(f"unknown kernel backend {name!r}")


def iet_arrays(t) -> tuple[np.ndarray, np.ndarray]:
    """Float64 (lefts, offsets) arrays for an Iet, kernel-ready."""
    lefts = np.array([float(x) for x in t.lefts], dtype=np.float64)
    offsets = np.array([float(x) for x in t.offsets], dtype=np.float64)
    return lefts, offsets
