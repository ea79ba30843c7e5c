import pytest

from kepler_qalg.casimir import (
    K1_central_form,
    build_K1,
    build_Ki,
    casimir_basis,
    fit_central_form,
    fitted_Ki,
    kia_printed_table,
    kib_printed_table,
    verify_K1_central_form,
    verify_K1_centrality,
    verify_Ki_central_form,
    verify_Ki_centrality,
)
from kepler_qalg.qalg import integrals
from kepler_qalg.weyl import DiffOp, anticommutator, commutator


def _K1_by_hand(n):
    """K_1 assembled term by term with explicit products (no op_expr)."""
    I = integrals(n)
    ring = I.ring
    H, X, Y1, Z, C = I.H, I.X, I.Y(1), I.Z(n - 2), I.C1()
    g2 = ring.gamma * ring.gamma
    out = C * C + anticommutator(Y1, X * X).scale(2)
    inner = DiffOp.scalar(ring, g2.scale(-2)) - H.scale((n - 1) ** 2) - (H * Z).scale(4)
    out = out + (Y1 * inner).scale(2) + (H * Y1 * Y1).scale(8)
    return out, (X * X)


def test_K1_n3_X2_coefficient():
    rest, X2 = _K1_by_hand(3)
    # 4 - (n-3)(n-1) = 4 at n = 3
    assert build_K1(3) - rest == X2.scale(4)


@pytest.mark.parametrize("n", [2, 4])
def test_K1_matches_hand_assembly(n):
    rest, X2 = _K1_by_hand(n)
    assert build_K1(n) == rest + X2.scale(4 - (n - 3) * (n - 1))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_K1_central(n):
    assert all(r.passed for r in verify_K1_centrality(n))


@pytest.mark.parametrize("n", [2, 3, 4])
def test_K1_central_form(n):
    assert verify_K1_central_form(n).passed


def test_K1_n3_is_minus_4g2_Z1():
    I = integrals(3)
    g2 = I.ring.gamma * I.ring.gamma
    assert build_K1(3) == I.Z(1).scale(-g2.scale(4))


def test_K1_n4_explicit():
    I = integrals(4)
    ring = I.ring
    H, Z = I.H, I.Z(2)
    g2 = ring.gamma * ring.gamma
    expect = Z.scale(g2.scale(-4)) - DiffOp.scalar(ring, g2.scale(2)) - (H * Z).scale(6) - H.scale(9)
    assert K1_central_form(4) == expect
    assert build_K1(4) == expect


def test_K1_n2_uses_Z0():
    # Z_0 = -2 beta_1 makes the central form a function of H and beta_1;
    # the gamma^2 beta_1 term needs coupling degree 3
    I = integrals(2)
    fit = fit_central_form(build_K1(2), [("H", I.H)], param_degree=3)
    assert fit.ok
    tab = fit.table_str()
    assert tab["1"] == {"g^2": "2", "b1*g^2": "8"}
    assert tab["H"] == {"1": "1", "b1": "-4"}


def test_K1_central_fit_n4():
    I = integrals(4)
    res = fit_central_form(build_K1(4), [("H", I.H), ("Z2", I.Z(2))])
    assert res.ok
    tab = res.table_str()
    assert tab["H*Z2"] == {"1": "-6"} and tab["H"] == {"1": "-9"}
    assert tab["Z2"] == {"g^2": "-4"} and tab["1"] == {"g^2": "-2"}


@pytest.mark.parametrize("n,i", [(3, 2), (4, 2), (4, 3)])
def test_printed_Ki_not_central_fitted_is(n, i):
    reps = verify_Ki_centrality(n, i)
    for r in reps:
        assert r.extra["printed_residual_terms"] > 0
        assert r.status == "corrected" and r.residual_terms == 0


@pytest.mark.parametrize("n,i", [(3, 2), (4, 2), (4, 3)])
def test_Ki_central_form_corrected(n, i):
    rep = verify_Ki_central_form(n, i)
    assert rep.status == "corrected"
    assert rep.extra["fitted_casimir_minus_printed_form_terms"] == 0
    assert rep.fitted_coefficients == rep.printed_coefficients


def test_fit_methods_agree():
    a = fitted_Ki(3, 2, "central-form")
    b = fitted_Ki(3, 2, "centrality")
    assert a.fit.ok and b.fit.ok
    assert a.fit.coefficients == b.fit.coefficients
    assert (a.op - b.op).is_zero()


def test_fitted_Ki_is_central_directly():
    I = integrals(4)
    K = fitted_Ki(4, 2).op
    assert commutator(K, I.Z(1)).is_zero() and commutator(K, I.Y(2)).is_zero()
    # the shared central elements commute with it too
    assert commutator(K, I.Y(3)).is_zero()


def test_fitted_keeps_printed_anticommutator_terms():
    fit = fitted_Ki(4, 2).fit.table_str()
    printed = kia_printed_table(4, 2)
    for key in ("{Z1,Y2}", "{Z1^2,Y2}", "{Z1,Y2^2}"):
        assert fit[key] == printed[key]


def test_printed_square_coefficients_differ():
    fit = fitted_Ki(4, 2).fit.table_str()
    printed = kia_printed_table(4, 2)
    assert fit["Z1^2"] != printed["Z1^2"] or fit["Y2^2"] != printed["Y2^2"]


def test_Yn_dropped_for_last_index():
    for table in (kib_printed_table(4, 3), kia_printed_table(4, 3)):
        assert not any("Y4" in k for k in table)


def test_casimir_basis_is_noncentral_cubic():
    labels = [lab for lab, _ in casimir_basis(4, 2)]
    assert len(labels) == len(set(labels))
    assert "{Z1^2,Y2}" in labels and "Z1^3" in labels
    assert not any(lab.startswith("C") for lab in labels)


def test_build_Ki_index_check():
    with pytest.raises(ValueError):
        build_Ki(3, 3)
    with pytest.raises(ValueError):
        fitted_Ki(4, 2, "bogus")
