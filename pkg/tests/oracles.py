"""Independent sympy implementations used as test oracles.

Operators are plain Python callables acting on sympy expressions, built from
the defining formulas without any of the package's normal-ordering code.
"""

import random
from fractions import Fraction

import sympy as sp

# points on rational spheres: (coordinates, r)
SPHERE_POINTS = {
    2: [((3, 4), 5), ((5, 12), 13), ((8, 15), 17)],
    3: [((2, 3, 6), 7), ((1, 4, 8), 9), ((2, 6, 9), 11)],
    4: [((1, 2, 2, 4), 5), ((2, 4, 5, 6), 9), ((1, 1, 1, 1), 2)],
    5: [((1, 1, 1, 4, 5), 8), ((1, 2, 4, 6, 10), 13)],
}


class SymModel:
    """Hamiltonian and integrals in ``n`` dimensions acting on sympy expressions."""

    def __init__(self, n):
        self.n = n
        self.x = sp.symbols(f"x1:{n + 1}")
        self.beta = sp.symbols(f"b1:{n}")
        self.g = sp.Symbol("g")
        self.r = sp.sqrt(sum(xi ** 2 for xi in self.x))

    def d(self, k, f):
        return sp.diff(f, self.x[k - 1])

    def L(self, i, k, f):
        x = self.x
        return x[i - 1] * self.d(k, f) - x[k - 1] * self.d(i, f)

    def pot(self, idx):
        return sum(self.beta[k - 1] / self.x[k - 1] ** 2 for k in idx)

    def H(self, f):
        lap = sum(self.d(i, self.d(i, f)) for i in range(1, self.n + 1))
        return -lap / 2 - self.g / self.r * f + self.pot(range(1, self.n)) * f

    def X(self, f):
        n = self.n
        out = 0
        for k in range(1, n):
            out += self.L(n, k, self.d(k, f)) + self.d(k, self.L(n, k, f))
        out = out / 2
        out += 2 * self.x[n - 1] * (self.g / (2 * self.r) - self.pot(range(1, n))) * f
        return out

    def _casimir(self, lo, hi, f, pot_idx):
        out = 0
        for i in range(lo, hi + 1):
            for k in range(i + 1, hi + 1):
                out += self.L(i, k, self.L(i, k, f))
        sq = sum(self.x[j - 1] ** 2 for j in range(lo, hi + 1))
        return out - 2 * sq * self.pot(pot_idx) * f

    def Z(self, l, f):
        if l == 0:
            return -2 * self.beta[0] * f
        return self._casimir(1, l + 1, f, range(1, l + 2))

    def Y(self, p, f):
        if p == self.n:
            return 0 * f
        return self._casimir(p, self.n, f, range(p, self.n))

    def probe(self, seed):
        """A random polynomial times ``1 + r`` (exercises the ``r`` part)."""
        rng = random.Random(seed)
        f = 0
        for _ in range(3):
            mono = 1
            for xi in self.x:
                mono *= xi ** rng.randrange(3)
            f += rng.randrange(1, 6) * mono
        return f * (1 + self.r)

    def evaluate(self, expr, point, params):
        subs = dict(zip(self.x, point))
        subs.update({self.beta[k]: params[f"b{k + 1}"] for k in range(self.n - 1)})
        subs[self.g] = params["g"]
        return sp.nsimplify(sp.simplify(expr.subs(subs)))


def commutator(A, B):
    return lambda f: A(B(f)) - B(A(f))


def random_params(n, seed):
    rng = random.Random(seed)
    out = {f"b{k}": Fraction(rng.randrange(-9, 10), rng.randrange(1, 5)) for k in range(1, n)}
    out["g"] = Fraction(rng.randrange(1, 7), rng.randrange(1, 4))
    return out


def engine_value(elem, point, r, params):
    """Exact value of a package FieldElem at a rational-sphere point."""
    ring = elem.ring
    lay = ring.layout
    idx = {lay.beta_index(k): params[f"b{k}"] for k in range(1, ring.n)}
    idx[lay.gamma_index] = params["g"]
    return elem.evaluate([Fraction(c) for c in point], idx, Fraction(r))


def engine_probe(ring, sym_f_terms):
    """Rebuild ``SymModel.probe`` in the package's field (see ``probe_terms``)."""
    f = ring.zero
    for coeff, exps in sym_f_terms:
        full = list(exps) + [0] * (ring.layout.nvars - len(exps))
        f = f + ring.monomial(full, coeff)
    return f * (ring.one + ring.r)


def probe_terms(n, seed):
    """The ``(coeff, exps)`` list behind ``SymModel(n).probe(seed)``."""
    rng = random.Random(seed)
    out = []
    for _ in range(3):
        exps = [rng.randrange(3) for _ in range(n)]
        out.append((rng.randrange(1, 6), exps))
    return out


def to_sympy(value):
    return sp.Rational(value.numerator, value.denominator)


# --------------------------------------------------------------------------
# spectrum oracles

def sov_energy(N1, N2, J, pvals, gamma=1):
    """Separation-of-variables energy written out directly."""
    n = len(pvals) + 1
    D = N1 + N2 + 2 * sum(J) + sum(Fraction(p) for p in pvals) + Fraction(n - 1, 2)
    return -Fraction(gamma) ** 2 / (2 * D * D)


def brute_levels(n, pvals, bound):
    """``{D: (#(p, n_2..), #(N1, N2, J..))}`` by exhaustive nested loops."""
    vs = [Fraction(p) - Fraction(1, 2) for p in pvals]
    base = sum(vs) + n - 1
    out = {}
    top = int(bound - base) if bound >= base else -1
    for p in range(top + 1):
        for ns in _tuples(n - 2, top):
            D = base + p + 2 * sum(ns)
            if D <= bound:
                a, b = out.get(D, (0, 0))
                out[D] = (a + 1, b)
    for N1 in range(top + 1):
        for N2 in range(top + 1):
            for J in _tuples(n - 2, top):
                D = base + N1 + N2 + 2 * sum(J)
                if D <= bound:
                    a, b = out.get(D, (0, 0))
                    out[D] = (a, b + 1)
    return out


def _tuples(length, top):
    if length == 0:
        yield ()
        return
    for a in range(top + 1):
        for rest in _tuples(length - 1, top):
            yield (a,) + rest
