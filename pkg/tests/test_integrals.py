from fractions import Fraction

import pytest

import oracles
from kepler_qalg.integrals import ModelParams, build_H, build_X, build_Y, build_Z, ring_for
from kepler_qalg.weyl import DiffOp, apply, commutator


def _agree(n, op, sym_op, seeds=(0, 1)):
    """Engine operator vs sympy oracle, applied to probes at exact sphere points."""
    ring = ring_for(n)
    m = oracles.SymModel(n)
    for seed in seeds:
        got = apply(op, oracles.engine_probe(ring, oracles.probe_terms(n, seed)))
        want = sym_op(m)(m.probe(seed))
        params = oracles.random_params(n, seed)
        for point, r in oracles.SPHERE_POINTS[n][:2]:
            assert oracles.to_sympy(oracles.engine_value(got, point, r, params)) == m.evaluate(want, point, params)


@pytest.mark.parametrize("n", [2, 3])
def test_hamiltonian_matches_oracle(n):
    _agree(n, build_H(n), lambda m: m.H)


@pytest.mark.parametrize("n", [2, 3])
def test_X_matches_oracle(n):
    _agree(n, build_X(n), lambda m: m.X)


@pytest.mark.parametrize("n,p", [(2, 1), (3, 1), (3, 2), (4, 2)])
def test_Y_matches_oracle(n, p):
    _agree(n, build_Y(p, n), lambda m: (lambda f: m.Y(p, f)), seeds=(3,))


@pytest.mark.parametrize("n,l", [(3, 1), (4, 1), (4, 2)])
def test_Z_matches_oracle(n, l):
    _agree(n, build_Z(l, n), lambda m: (lambda f: m.Z(l, f)), seeds=(4,))


def test_H_n2_form():
    ring = ring_for(2)
    H = build_H(2)
    lap = DiffOp.partial(ring, 1, 2) + DiffOp.partial(ring, 2, 2)
    pot = -ring.gamma * ring.inv_r + ring.beta(1) * ring.x(1, -2)
    assert H == lap.scale(Fraction(-1, 2)) + DiffOp.scalar(ring, pot)
    assert apply(H, ring.one) == pot


def test_H_commutes_with_itself():
    H = build_H(3)
    assert commutator(H, H).is_zero()


def test_boundary_conventions():
    ring = ring_for(3)
    assert build_Z(0, 3) == DiffOp.scalar(ring, ring.beta(1).scale(-2))
    assert build_Y(3, 3).is_zero()


def test_X_is_an_integral_n3():
    assert commutator(build_X(3), build_H(3)).is_zero()


def test_index_errors():
    with pytest.raises(IndexError):
        build_Z(2, 3)
    with pytest.raises(IndexError):
        build_Y(0, 3)
    with pytest.raises(ValueError):
        ModelParams(1)
