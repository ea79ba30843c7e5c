"""Acceptance criteria, one pass/fail line each.

Run with ``pytest tests/test_acceptance.py -v`` (lines are printed inline) or
``python3 tests/test_acceptance.py``.  All identities are exact; the only
float tolerance is the Hermitian residual bound of criterion 9.
"""

import random
import sys
import time
from fractions import Fraction

import pytest

from kepler_qalg import casimir, oscillator as osc, qalg, spectrum as sp

SUBI_CASES = [(3, 2), (4, 2), (4, 3), (5, 2), (5, 3), (5, 4)]
HERMITIAN_TOL = 1e-10


def _summary(reports):
    bad = [r.relation.label() for r in reports if not r.ok]
    corrected = sum(r.status == "corrected" for r in reports)
    return not bad, f"{len(reports)} checks, {corrected} corrected" + (f", failing: {bad}" if bad else "")


def criterion_1():
    reps = []
    for n in (2, 3, 4, 5):  # n = 5 is the extended case
        reps += qalg.verify_cartan(n)
    ok = all(r.passed for r in reps)
    return ok, f"Cartan-type commutators exactly zero for n=2..5 ({len(reps)} relations)"


def criterion_2():
    reps = []
    for n in (2, 3, 4):
        reps += qalg.verify_integrals(n)
    return all(r.passed for r in reps), f"[H, X] = [H, Z_l] = [H, Y_p] = 0 for n=2,3,4 ({len(reps)} relations)"


def criterion_3():
    reps = []
    for n in (2, 3, 4):
        reps += qalg.verify_substructure1(n)
    return all(r.passed for r in reps), "sub-structure 1 relations hold as printed for n=2,3,4"


def criterion_4():
    outcomes = []
    ok = True
    for n, i in SUBI_CASES:
        reps = qalg.verify_substructure_i(n, i)
        for r in reps[:2]:
            exact = r.status == "pass" or (r.status == "corrected" and r.extra.get("fit_residual_terms") == 0)
            ok &= exact and bool(r.outcome)
            outcomes.append(r.status)
        ok &= all(r.passed for r in reps[2:])
    tally = {s: outcomes.count(s) for s in sorted(set(outcomes))}
    return ok, f"sub-structure i over {len(SUBI_CASES)} (n,i): outcomes {tally}"


def criterion_5():
    reps = []
    for n in (2, 3, 4):
        reps += casimir.verify_K1_centrality(n)
    ok1 = all(r.passed for r in reps)
    ki = []
    for n, i in SUBI_CASES:
        ki += casimir.verify_Ki_centrality(n, i)
    ok2 = all(r.ok and r.residual_terms == 0 for r in ki)
    _, detail = _summary(ki)
    return ok1 and ok2, f"K1 central as printed (n=2,3,4); K_i: {detail}"


def criterion_6():
    k1 = [casimir.verify_K1_central_form(n) for n in (2, 3, 4)]
    ok1 = all(r.passed for r in k1)
    ki = [casimir.verify_Ki_central_form(n, i) for n, i in SUBI_CASES]
    ok2 = all(r.ok and r.residual_terms == 0 for r in ki)
    _, detail = _summary(ki)
    return ok1 and ok2, f"K1 = central form exactly (n=2,3,4); K_i central forms: {detail}"


def criterion_7():
    r1 = osc.verify_factorization(1, osc.WeightParams())
    ri = osc.verify_factorization("i", osc.WeightParams())
    ok = r1.passed and ri.passed
    return ok, "Phi_1 and Phi_i expanded - factored = 0 with all parameters symbolic"


def criterion_8():
    reals = [osc.realize_sub1(osc.WeightParams(n=n)) for n in (3, 4)]
    reals += [osc.realize_subi(osc.WeightParams(n=4, i=i)) for i in (2, 3)]
    reps = [r for real in reals for r in real.reports]
    ok = all(r.passed for r in reps)
    return ok, f"shift realizations exact per degree ({len(reps)} identities, sub 1 n=3,4; sub i (4,2),(4,3))"


def criterion_9():
    pvals = [1, 1]
    worst = 0.0
    ok = True
    for p in range(0, 11):
        qn = sp.QuantumNumbers.from_p(p, [0], pvals)
        params = osc.sub1_rep_params(3, sp.m_last(qn), 1, p)
        phi = osc.phi1(params)
        vals = osc.phi_values(phi, params.u, p)
        ok &= vals[0] == 0 and vals[p + 1] == 0 and all(v > 0 for v in vals[1:p + 1])
        rep = osc.build_rep(phi, p, params.u)
        ok &= all(v == 0 for v in rep.check_exact().values())
        h = max(rep.check_hermitian().values())
        worst = max(worst, h)
        ok &= h < HERMITIAN_TOL
    return ok, f"n=3, p_i=1, gamma=1, p=0..10: boundary zeros, positivity, exact relations; max Hermitian residual {worst:.1e}"


def criterion_10():
    count = 0
    for n in (2, 3, 4, 5):
        for base in (0, 1, Fraction(1, 2)):
            count += sp.sweep_sov_agreement(n, [base] * (n - 1), 6)
    rng = random.Random(20241015)
    for _ in range(100):
        n = rng.randrange(2, 6)
        pv = [Fraction(rng.randrange(0, 60), rng.randrange(1, 12)) for _ in range(n - 1)]
        count += sp.sweep_sov_agreement(n, pv, 6)
    ok = True
    for gamma in (1, Fraction(3, 2)):
        levels = sp.enumerate_levels(3, [0, 0], gamma, 25)
        ok &= [lv.D for lv in levels] == list(range(1, 26))
        ok &= all(lv.energy == -Fraction(gamma) ** 2 / (2 * lv.D ** 2) for lv in levels)
    return ok, f"algebraic = sov on {count} tuples (n=2..5, 100 random p_i sets); hydrogen limit D=1..25"


def criterion_11():
    rng = random.Random(11)
    for _ in range(1000):
        n = rng.randrange(3, 9)
        qn = sp.QuantumNumbers(
            rng.randrange(0, 20),
            tuple(rng.randrange(0, 10) for _ in range(n - 2)),
            tuple(Fraction(rng.randrange(-30, 30), rng.randrange(1, 10)) for _ in range(n - 1)),
        )
        if sp.m_last(qn) != sp.m_closed(qn):
            return False, f"mismatch at {qn}"
    return True, "m-recursion equals the closed form on 1000 random inputs"


CRITERIA = [
    (1, "Cartan relations", criterion_1),
    (2, "integrals of motion", criterion_2),
    (3, "sub-structure 1", criterion_3),
    (4, "sub-structure i", criterion_4),
    (5, "Casimir centrality", criterion_5),
    (6, "central forms", criterion_6),
    (7, "structure-function factorizations", criterion_7),
    (8, "shift-operator realizations", criterion_8),
    (9, "representations", criterion_9),
    (10, "spectrum vs separation of variables", criterion_10),
    (11, "recursion vs closed form", criterion_11),
]


def _line(num, name, ok, detail, secs):
    return f"[criterion {num:>2}] {'PASS' if ok else 'FAIL'}  {name}: {detail} ({secs:.1f} s)"


@pytest.mark.parametrize("num,name,fn", CRITERIA, ids=[f"criterion_{c[0]}" for c in CRITERIA])
def test_criterion(num, name, fn, capsys):
    t0 = time.perf_counter()
    ok, detail = fn()
    with capsys.disabled():
        print("\n" + _line(num, name, ok, detail, time.perf_counter() - t0))
    assert ok, detail


if __name__ == "__main__":
    failed = 0
    for num, name, fn in CRITERIA:
        t0 = time.perf_counter()
        ok, detail = fn()
        failed += not ok
        print(_line(num, name, ok, detail, time.perf_counter() - t0), flush=True)
    sys.exit(1 if failed else 0)
