"""Kernel selection: compiled extension if importable, else pure Python.

Set ``KEPLER_QALG_PURE=1`` to force the pure-Python kernels.
"""

import os

from . import _pykernel

BACKEND = "python"

if os.environ.get("KEPLER_QALG_PURE", "") not in ("", "0"):
    _ext = None
else:
    try:
        from . import _ckernel as _ext
    except ImportError:  # extension not built
        _ext = None


def _wrap_mul(c_mul, py_mul):
    def mul_terms(a, b):
        out = c_mul(a, b)
        if out is None:  # int64 overflow or wide keys
            return py_mul(a, b)
        return out
    mul_terms.__doc__ = py_mul.__doc__
    return mul_terms


def _wrap_addmul(c_addmul, py_addmul):
    def addmul_into(out, a, b, scale):
        if not c_addmul(out, a, b, scale):
            py_addmul(out, a, b, scale)
    addmul_into.__doc__ = py_addmul.__doc__
    return addmul_into


if _ext is not None:
    BACKEND = "compiled"
    mul_terms = _wrap_mul(_ext.mul_terms, _pykernel.mul_terms)
    addmul_into = _wrap_addmul(_ext.addmul_into, _pykernel.addmul_into)
    rho_divide = getattr(_ext, "rho_divide", _pykernel.rho_divide)
else:
    mul_terms = _pykernel.mul_terms
    addmul_into = _pykernel.addmul_into
    rho_divide = _pykernel.rho_divide

__all__ = ["BACKEND", "mul_terms", "addmul_into", "rho_divide"]
