"""Exact computer algebra for the quadratic algebras of the n-dimensional
Kepler-Coulomb system with ``beta_i / x_i**2`` terms.

Modules: ``scalars`` (coefficient field), ``weyl`` (differential operators),
``integrals`` (H, X, Y_p, Z_l), ``qalg`` (relations and fitting), ``casimir``,
``oscillator`` (structure functions, shift realizations, representations),
``spectrum`` and ``cli``.
"""

from .kernel import BACKEND

__version__ = "0.1.0"

__all__ = ["BACKEND", "__version__"]
