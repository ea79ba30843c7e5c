"""Hamiltonian and integrals of motion of the Kepler-Coulomb model with
non-central terms ``beta_i / x_i**2`` in ``n`` dimensions.

All couplings stay symbolic (polynomial generators of the coefficient field).
Two boundary conventions make the sub-structure formulas uniform in the index:
``Z_0 = -2 beta_1`` and ``Y_n = 0``.
"""

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .scalars import Ring
from .weyl import DiffOp, combination


@dataclass(frozen=True)
class ModelParams:
    n: int
    symbolic_beta: bool = True
    symbolic_gamma: bool = True
    ring: Ring = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if self.n < 2:
            raise ValueError(f"dimension must be >= 2, got {self.n}")
        object.__setattr__(self, "ring", _ring(self.n))


@lru_cache(maxsize=None)
def _ring(n):
    return Ring(n)


def _params(params):
    if isinstance(params, int):
        return ModelParams(params)
    return params


def momentum(ring, k):
    """``p_k = d/dx_k``."""
    return DiffOp.partial(ring, k)


def angular(ring, i, k):
    """``L_ik = x_i d_k - x_k d_i``."""
    op = DiffOp.partial(ring, k).scale(ring.x(i)) - DiffOp.partial(ring, i).scale(ring.x(k))
    return op


def _potential_sum(ring, indices):
    """``sum(beta_k / x_k**2 for k in indices)`` as a field element."""
    total = ring.zero
    for k in indices:
        total = total + ring.beta(k) * ring.x(k, -2)
    return total


def _square_sum(ring, indices):
    total = ring.zero
    for i in indices:
        total = total + ring.x(i, 2)
    return total


def _sum_of_squares_of_L(ring, lo, hi):
    """``sum_{lo <= i < k <= hi} L_ik**2`` summed in one pass."""
    prods = []
    for i in range(lo, hi + 1):
        for k in range(i + 1, hi + 1):
            L = angular(ring, i, k)
            prods.append((1, L, L))
    return combination(ring, prods)


@lru_cache(maxsize=None)
def _build_H(n):
    ring = _ring(n)
    lap = DiffOp(ring)
    for i in range(1, n + 1):
        lap = lap + DiffOp.partial(ring, i, 2)
    pot = -ring.gamma * ring.inv_r + _potential_sum(ring, range(1, n))
    return lap.scale(Fraction(-1, 2)) + DiffOp.scalar(ring, pot)


def build_H(params):
    """``H = -1/2 sum d_i^2 - gamma/r + sum_{i<n} beta_i / x_i^2``."""
    return _build_H(_params(params).n)


@lru_cache(maxsize=None)
def _build_X(n):
    ring = _ring(n)
    prods = []
    for k in range(1, n):
        L = angular(ring, n, k)
        p = momentum(ring, k)
        prods.append((1, L, p))
        prods.append((1, p, L))
    sym = combination(ring, prods)
    pot = ring.x(n) * (ring.gamma * ring.inv_r - _potential_sum(ring, range(1, n)).scale(2))
    return sym.scale(Fraction(1, 2)) + DiffOp.scalar(ring, pot)


def build_X(params):
    """``X = 1/2 sum_{k<n} (L_nk p_k + p_k L_nk) + 2 x_n (gamma/(2r) - sum beta_i/x_i^2)``."""
    return _build_X(_params(params).n)


@lru_cache(maxsize=None)
def _build_Z(n, l):
    ring = _ring(n)
    if l == 0:
        return DiffOp.scalar(ring, ring.beta(1).scale(-2))
    Ls = _sum_of_squares_of_L(ring, 1, l + 1)
    pot = _square_sum(ring, range(1, l + 2)) * _potential_sum(ring, range(1, l + 2))
    return Ls - DiffOp.scalar(ring, pot.scale(2))


def build_Z(l, params):
    """``Z_l`` for ``0 <= l <= n-2``; ``Z_0`` is the constant ``-2 beta_1``."""
    n = _params(params).n
    if not 0 <= l <= n - 2:
        raise IndexError(f"Z_{l} not defined for n={n} (0 <= l <= {n - 2})")
    return _build_Z(n, l)


@lru_cache(maxsize=None)
def _build_Y(n, p):
    ring = _ring(n)
    if p == n:
        return DiffOp.zero(ring)
    Ls = _sum_of_squares_of_L(ring, p, n)
    pot = _square_sum(ring, range(p, n + 1)) * _potential_sum(ring, range(p, n))
    return Ls - DiffOp.scalar(ring, pot.scale(2))


def build_Y(p, params):
    """``Y_p`` for ``1 <= p <= n``; ``Y_n`` is the zero operator."""
    n = _params(params).n
    if not 1 <= p <= n:
        raise IndexError(f"Y_{p} not defined for n={n} (1 <= p <= {n})")
    return _build_Y(n, p)


def ring_for(n):
    return _ring(n)
