"""Interval exchange transformations and the spectral theory they generate.

Subpackage map:

* :mod:`ietspec.permutation` -- exact combinatorics of the permutation:
  irreducibility, rotation class, the endpoint digraph, Type W.
* :mod:`ietspec.iet` -- the dynamical system itself: evaluation, orbits,
  one-sided limits of powers, Keane falsification, alignment.
* :mod:`ietspec.sampling` -- sampling functions and the discontinuity
  scans feeding the spectral criteria.
* :mod:`ietspec.spectral` -- transfer-matrix cocycles, Lyapunov
  exponents, truncated spectra, AC-spectrum indicator.
* :mod:`ietspec.gordon` -- continued fractions, Liouville rotations,
  Gordon certificates.
* :mod:`ietspec.cli` -- the ``ietspec`` command line.
"""

__version__ = "0.1.0"
