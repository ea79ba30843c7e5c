"""Differential operators in normal form over the ``r``-extended Laurent field.

An operator is ``sum(coeff[alpha] * d^alpha)`` with every coefficient to the
left of the derivative monomial.  Products are normal-ordered with the
multi-index Leibniz rule

    d^alpha . f = sum_{nu <= alpha} C(alpha, nu) (d^nu f) d^(alpha - nu).

Products are summed into a raw accumulator keyed by ``(alpha, rho power, part)``
and canonicalized once per output index, so cancellations happen before any
``rho`` division is attempted.
"""

from fractions import Fraction
from math import comb, gcd

from .kernel import addmul_into
from .scalars import DimensionError, FieldElem, Poly, Ring, ZERO_POLY

_AW = 8  # bits per derivative order in a packed multi-index


def pack_alpha(alpha):
    return sum(a << (_AW * j) for j, a in enumerate(alpha))


def unpack_alpha(key, n):
    m = (1 << _AW) - 1
    return tuple((key >> (_AW * j)) & m for j in range(n))


class DiffOp:
    """Immutable normal-form differential operator."""

    __slots__ = ("ring", "terms", "_hash")

    def __init__(self, ring, terms=None):
        self.ring = ring
        self.terms = {a: c for a, c in (terms or {}).items() if c}
        self._hash = None

    # constructors -------------------------------------------------------
    @classmethod
    def zero(cls, ring):
        return cls(ring, {})

    @classmethod
    def scalar(cls, ring, value):
        if not isinstance(value, FieldElem):
            value = ring.const(value)
        return cls(ring, {0: value})

    @classmethod
    def identity(cls, ring):
        return cls.scalar(ring, 1)

    @classmethod
    def partial(cls, ring, i, order=1):
        if not 1 <= i <= ring.n:
            raise IndexError(f"axis {i} out of range 1..{ring.n}")
        alpha = [0] * ring.n
        alpha[i - 1] = order
        return cls(ring, {pack_alpha(alpha): ring.one})

    # basic protocol -----------------------------------------------------
    @property
    def n(self):
        return self.ring.n

    def __bool__(self):
        return bool(self.terms)

    def is_zero(self):
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.ring.n == other.ring.n and self.terms == other.terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self.terms.items()))
        return self._hash

    def __repr__(self):
        return f"DiffOp(n={self.n}, terms={len(self.terms)})"

    def _check(self, other):
        if self.ring.n != other.ring.n:
            raise DimensionError(f"dimension mismatch: {self.ring.n} vs {other.ring.n}")

    def order(self):
        """Highest total derivative order (``-1`` for the zero operator)."""
        if not self.terms:
            return -1
        return max(sum(unpack_alpha(a, self.n)) for a in self.terms)

    def term_count(self):
        """Number of monomials across all coefficients (residual size measure)."""
        return sum(len(c.A) + len(c.B) for c in self.terms.values())

    def coefficient(self, alpha):
        return self.terms.get(pack_alpha(alpha), self.ring.zero)

    def items(self):
        n = self.n
        for a in sorted(self.terms):
            yield unpack_alpha(a, n), self.terms[a]

    def to_str(self):
        if not self.terms:
            return "0"
        out = []
        for alpha, c in self.items():
            d = "*".join(
                (f"d{i + 1}" if e == 1 else f"d{i + 1}^{e}") for i, e in enumerate(alpha) if e
            )
            out.append(f"[{c.to_str()}]" + (f"*{d}" if d else ""))
        return " + ".join(out)

    # linear structure ---------------------------------------------------
    def __neg__(self):
        return DiffOp(self.ring, {a: -c for a, c in self.terms.items()})

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.scalar(self.ring, other)
        self._check(other)
        out = dict(self.terms)
        for a, c in other.terms.items():
            prev = out.get(a)
            out[a] = c if prev is None else prev + c
        return DiffOp(self.ring, out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.scalar(self.ring, other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, q):
        """Multiply by a scalar (rational or field element) from the left."""
        if isinstance(q, FieldElem):
            return DiffOp(self.ring, {a: q * c for a, c in self.terms.items()})
        q = Fraction(q)
        if not q:
            return DiffOp(self.ring)
        return DiffOp(self.ring, {a: c.scale(q) for a, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, DiffOp):
            return op_mul(self, other)
        return self.scale(other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, k):
        if k < 0:
            raise ValueError("negative power")
        out = DiffOp.identity(self.ring)
        for _ in range(k):
            out = op_mul(out, self)
        return out

    def substitute_params(self, values):
        return DiffOp(self.ring, {a: c.substitute_params(values) for a, c in self.terms.items()})


class _Accumulator:
    """Raw sums of coefficient products, canonicalized at the end."""

    def __init__(self, ring):
        self.ring = ring
        self.buckets = {}  # (alpha, k, part) -> [terms, den]

    def add_product(self, alpha, f, g, scale):
        """Add ``scale * f * g`` at derivative index ``alpha``."""
        k = f.k + g.k
        fA, fB, gA, gB = f.A, f.B, g.A, g.B
        if fA.terms and gA.terms:
            self._add(alpha, k, 0, fA, gA, scale)
        if fB.terms and gB.terms:
            # r * r = rho lowers the denominator power by one
            self._add(alpha, k - 1, 0, fB, gB, scale)
        if fA.terms and gB.terms:
            self._add(alpha, k, 1, fA, gB, scale)
        if fB.terms and gA.terms:
            self._add(alpha, k, 1, fB, gA, scale)

    def add_elem(self, alpha, f, scale):
        one = Poly({0: 1}, 1, _raw=True)
        if f.A.terms:
            self._add(alpha, f.k, 0, f.A, one, scale)
        if f.B.terms:
            self._add(alpha, f.k, 1, f.B, one, scale)

    def _add(self, alpha, k, part, P, Q, scale):
        key = (alpha, k, part)
        den = P.den * Q.den
        ent = self.buckets.get(key)
        if ent is None:
            ent = self.buckets[key] = [{}, den]
        elif ent[1] != den:
            cur = ent[1]
            g = gcd(cur, den)
            lcm = cur // g * den
            up = lcm // cur
            if up != 1:
                ent[0] = {kk: c * up for kk, c in ent[0].items()}
                ent[1] = lcm
            scale = scale * (lcm // den)
        else:
            pass
        addmul_into(ent[0], P.terms, Q.terms, scale)

    def result(self):
        ring = self.ring
        grouped = {}
        for (alpha, k, part), (terms, den) in self.buckets.items():
            grouped.setdefault(alpha, []).append((k, part, terms, den))
        out = {}
        for alpha, entries in grouped.items():
            live = []
            for k, part, terms, den in entries:
                P = Poly(terms, den)
                if P.terms:
                    live.append((k, part, P))
            if not live:
                continue
            kmax = max(k for k, _, _ in live)
            A = ZERO_POLY
            B = ZERO_POLY
            for k, part, P in live:
                if k < kmax:
                    P = ring.times_rho(P, kmax - k)
                if part == 0:
                    A = A + P
                else:
                    B = B + P
            c = ring.make(A, B, kmax)
            if c:
                out[alpha] = c
        return DiffOp(ring, out)


def _derivative_table(f, max_alpha, n):
    """``{nu: d^nu f}`` for all ``nu <= max_alpha`` (componentwise)."""
    table = {(0,) * n: f}
    # breadth-first over multi-indices, each built from a lower neighbour
    order = sorted(
        _below(max_alpha), key=lambda nu: sum(nu)
    )
    for nu in order:
        if nu in table:
            continue
        j = next(i for i, e in enumerate(nu) if e)
        prev = nu[:j] + (nu[j] - 1,) + nu[j + 1:]
        table[nu] = table[prev].derive(j + 1) if table[prev] else table[prev]
    return table


def _below(alpha):
    from itertools import product
    return product(*(range(a + 1) for a in alpha))


def _mul_into(acc, a, b, sign):
    """Accumulate ``sign * a * b``."""
    n = a.ring.n
    a_items = [(unpack_alpha(k, n), c) for k, c in a.terms.items()]
    if not a_items or not b.terms:
        return
    max_alpha = tuple(max(al[j] for al, _ in a_items) for j in range(n))
    # multi-index binomial weights per (alpha, nu)
    splits = []
    for al, fc in a_items:
        row = []
        for nu in _below(al):
            w = 1
            for x, y in zip(al, nu):
                w *= comb(x, y)
            row.append((nu, pack_alpha(nu), pack_alpha(al) - pack_alpha(nu), w))
        splits.append((fc, row))
    for bkey, g in b.terms.items():
        table = _derivative_table(g, max_alpha, n)
        for fc, row in splits:
            for nu, _nukey, restkey, w in row:
                dg = table[nu]
                if dg:
                    acc.add_product(restkey + bkey, fc, dg, sign * w)


def op_mul(a, b):
    """Normal-ordered product ``a . b``."""
    a._check(b)
    acc = _Accumulator(a.ring)
    _mul_into(acc, a, b, 1)
    return acc.result()


def combination(ring, products=(), singles=()):
    """``sum(c * a . b for c, a, b in products) + sum(c * a for c, a in singles)``.

    Everything is summed before canonicalization, which is much cheaper than
    adding canonical operators one at a time.  Coefficients ``c`` are integers.
    """
    acc = _Accumulator(ring)
    for c, a, b in products:
        a._check(b)
        _mul_into(acc, a, b, c)
    for c, a in singles:
        for key, f in a.terms.items():
            acc.add_elem(key, f, c)
    return acc.result()


def commutator(a, b):
    """``[a, b] = a.b - b.a``."""
    return combination(a.ring, [(1, a, b), (-1, b, a)])


def anticommutator(a, b):
    """``{a, b} = a.b + b.a``."""
    return combination(a.ring, [(1, a, b), (1, b, a)])


def apply(op, f):
    """Action of ``op`` on the field element ``f`` (a test function)."""
    ring = op.ring
    if ring.n != f.ring.n:
        raise DimensionError(f"dimension mismatch: {ring.n} vs {f.ring.n}")
    n = ring.n
    if not op.terms:
        return ring.zero
    alphas = [unpack_alpha(k, n) for k in op.terms]
    max_alpha = tuple(max(al[j] for al in alphas) for j in range(n))
    table = _derivative_table(f, max_alpha, n)
    acc = _Accumulator(ring)
    for key, c in op.terms.items():
        d = table[unpack_alpha(key, n)]
        if d:
            acc.add_product(0, c, d, 1)
    res = acc.result()
    return res.terms.get(0, ring.zero)


def mul_field(f, op):
    """``f . op`` for a field element ``f`` (left multiplication)."""
    return op.scale(f)


__all__ = [
    "DiffOp",
    "Ring",
    "anticommutator",
    "apply",
    "combination",
    "commutator",
    "op_mul",
    "pack_alpha",
    "unpack_alpha",
]
