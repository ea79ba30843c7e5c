from fractions import Fraction

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from kepler_qalg.oscillator import (
    PHI1_LEADING,
    BoundaryError,
    NRat,
    PositivityError,
    ShiftOp,
    T,
    WeightParams,
    build_rep,
    commutator,
    default_u,
    oscillator_ops,
    phi1,
    phi_i,
    realize_sub1,
    realize_subi,
    sub1_rep_params,
    subi_centrals,
    sym,
    u_roots,
    v_branches,
    v_from_beta,
    verify_factorization,
)

HALF = Fraction(1, 2)
small_q = st.fractions(min_value=-5, max_value=5, max_denominator=6)


# --------------------------------------------------------------------------
# rational functions and shift operators

def test_nrat_shift_and_subs():
    f = T * T + sym("m")
    assert f.shift(1) == (T + 1) * (T + 1) + sym("m")
    assert f.subs({"m": 3}).at(2) == 7


def test_nrat_compose():
    f = T * T
    assert f.subs({"t": sym("m") + 1}) == (sym("m") + 1) ** 2


def test_shift_moves_functions():
    # S g(t) = g(t - 1) S
    g = ShiftOp.function(T * T)
    S = ShiftOp.shift(1)
    assert S * g == ShiftOp.function((T - 1) * (T - 1)) * S


def test_oscillator_ops_relations():
    phi = T * (T - 3) * sym("h")
    N, bp, bm = oscillator_ops(phi)
    assert (commutator(N, bp) - bp).is_zero()
    assert (commutator(N, bm) + bm).is_zero()
    assert (bp * bm - ShiftOp.function(phi)).is_zero()
    assert (bm * bp - ShiftOp.function(phi.shift(1))).is_zero()


@given(small_q, small_q)
def test_shift_algebra_associative(a, b):
    x = ShiftOp({1: T + a, -1: NRat.const(b) * T})
    y = ShiftOp({0: T * T, 2: NRat.const(a)})
    z = ShiftOp({-1: NRat.const(1), 1: T - b})
    assert ((x * y) * z - x * (y * z)).is_zero()


# --------------------------------------------------------------------------
# structure functions

def test_phi1_factorization_symbolic():
    rep = verify_factorization(1, WeightParams())
    assert rep.passed
    # n is left symbolic and drops out of the substituted structure function
    assert set(rep.extra["symbolic"]) == {"h", "g", "m"}


def test_phi_i_factorization_symbolic():
    rep = verify_factorization("i", WeightParams())
    assert rep.passed
    # n and i are symbolic on input and cancel
    assert set(rep.extra["symbolic"]) == {"m", "v", "y1", "yn"}
    assert phi_i(WeightParams(), casimir="symbol").free_symbols() >= {"n", "i"}


def test_phi1_sympy_roots():
    # oracle: sympy sees the linear factors of the expanded form directly
    e = phi1(WeightParams(n=4), "expanded")
    expr = sp.sympify(str(e))
    t, m = sp.symbols("t m")
    for root in (HALF + m, HALF - m, HALF):
        assert sp.expand(expr.subs(t, root)) == 0
    # double root at t = 1/2
    assert sp.expand(sp.diff(expr, t).subs(t, HALF)) == 0
    lead = sp.Poly(sp.expand(expr), t).LC()
    assert sp.simplify(lead - PHI1_LEADING * sp.Symbol("h")) == 0


def test_phi1_zero_at_boundary_u():
    p = WeightParams(n=5)
    phi = phi1(p, "expanded")
    assert phi.subs({"t": HALF + sym("m")}).is_zero()


def test_phi_i_zero_at_boundary_u():
    p = WeightParams(n=5, i=3)
    phi = phi_i(p, "expanded")
    u = (sym("m") + sym("v") + 1) / 2
    assert phi.subs({"t": u}).is_zero()


def test_i2_boundary_relation():
    # Z_0 = 1/4 - m_0^2 and Z_0 = -2 beta_1 agree when m_0^2 = v_1^2
    v = sym("v")
    Zpp, _, _, _ = subi_centrals(WeightParams(n=4, i=2))
    beta1 = (4 * v * v - 1) / 8
    assert (Zpp.subs({"m": v}) - (-2 * beta1)).is_zero()


def test_factored_needs_nonzero_h():
    with pytest.raises(ZeroDivisionError):
        phi1(WeightParams(n=3, h=0), "factored")


# --------------------------------------------------------------------------
# realizations

def test_sub1_realization_symbolic_n():
    real = realize_sub1(WeightParams())
    assert real.ok and len(real.reports) == 2


@pytest.mark.parametrize("n", [3, 4])
def test_sub1_realization(n):
    real = realize_sub1(WeightParams(n=n))
    assert real.ok
    assert len(real.reports) == 6


def test_sub1_printed_weights_fail():
    # weights on both sides of X break [X, C1] (only in the constant degree)
    real = realize_sub1(WeightParams(n=3), weights="printed")
    bad = [r for r in real.reports if not r.ok]
    assert [r.relation.detail for r in bad] == ["[X,C1]"]
    assert bad[0].extra["nonzero_degrees"] == [0]


@pytest.mark.parametrize("i", [2, 3])
def test_subi_realization_n4(i):
    real = realize_subi(WeightParams(n=4, i=i))
    assert real.ok, [(r.relation.detail, r.residual_terms) for r in real.reports if not r.ok]


def test_subi_printed_relations_fail():
    real = realize_subi(WeightParams(n=4, i=2), relations="printed")
    assert not real.ok


# --------------------------------------------------------------------------
# representations

def test_rep_p0():
    params = sub1_rep_params(3, 2, 1, 0)
    rep = build_rep(phi1(params), 0, params.u)
    assert rep.dim == 1
    assert rep.bdag == [[0]] and rep.b == [[0]]


def test_rep_n3_p2_hydrogen_like():
    # beta_i = 0 with v_i = 1/2: m_1 = v_1 + v_2 + 1 = 2
    params = sub1_rep_params(3, 2, 1, 2)
    rep = build_rep(phi1(params), 2, params.u)
    assert all(v > 0 for v in rep.phi_values[1:3])
    assert all(v == 0 for v in rep.check_exact().values())
    assert max(rep.check_hermitian().values()) < 1e-10
    assert params.h == Fraction(-1, 50)


def test_positivity_violation():
    # negative branch v_1 = v_2 = -5/4 gives m = -3/2 and Phi(1) < 0
    m = Fraction(-5, 4) * 2 + 1
    params = sub1_rep_params(3, m, 1, 2)
    with pytest.raises(PositivityError) as exc:
        build_rep(phi1(params), 2, params.u)
    assert exc.value.k == 1 and exc.value.value < 0


def test_boundary_violation():
    params = sub1_rep_params(3, 2, 1, 2)
    with pytest.raises(BoundaryError):
        build_rep(phi1(params), 3, params.u)


def test_u_roots_order():
    p = WeightParams(n=3, m=2)
    assert default_u(1, p) == Fraction(5, 2)
    assert u_roots(1, p) == [Fraction(5, 2), Fraction(-3, 2), HALF]


def test_v_from_beta():
    assert v_from_beta(0) == HALF
    assert v_from_beta(Fraction(21, 32), -1) == Fraction(-5, 4)
    assert v_branches(Fraction(-1, 8)) == [0]
    with pytest.raises(PositivityError):
        v_from_beta(-1)
    with pytest.raises(ValueError):
        v_from_beta(Fraction(1, 3))


def test_weight_params_consistency():
    with pytest.raises(ValueError):
        WeightParams(v=1, beta=1)
    with pytest.raises(ValueError):
        WeightParams(n=3, i=3)
    assert WeightParams(v=HALF).get("b") == 0


@given(st.integers(0, 6), st.integers(0, 3), st.integers(1, 4))
def test_boundary_zeros_for_any_level(p, n2, pv):
    # Phi(0) = Phi(p+1) = 0 at the boundary values, for n = 3
    m = 2 * n2 + 2 * (Fraction(pv) - HALF) + 1
    params = sub1_rep_params(3, m, 1, p)
    phi = phi1(params)
    assert phi.at(params.u) == 0
    assert phi.at(params.u + p + 1) == 0
