"""Exact coefficient field for the differential-operator engine.

Elements are written ``(A + B*r) / rho**k`` where ``rho = x_1**2 + ... + x_n**2``,
``r**2 = rho`` and ``A``, ``B`` are Laurent polynomials in the coordinates with
polynomial dependence on the couplings ``beta_1 .. beta_{n-1}`` and ``gamma``.

Monomials are packed into a single integer: exponent ``e_j`` of generator ``j``
contributes ``e_j << (width*j)``.  The map is linear, so multiplying monomials
is adding keys, and negative exponents need no special handling as long as every
exponent stays inside ``(-2**(width-1), 2**(width-1))``.
"""

from fractions import Fraction
from itertools import product
from math import gcd

from .kernel import mul_terms, rho_divide


class DimensionError(ValueError):
    """Operands built over different dimensions were combined."""


class Layout:
    """Packing of exponent vectors over ``x_1..x_n, beta_1..beta_{n-1}, gamma``."""

    def __init__(self, n):
        if n < 1:
            raise ValueError("dimension must be positive")
        self.n = n
        self.nvars = 2 * n
        width = 63 // self.nvars
        # keys must fit a signed 64-bit word for the compiled kernel; below six
        # bits per field fall back to wide Python-int keys
        self.packed64 = width >= 6
        self.width = min(width, 16) if self.packed64 else 16
        self.half = 1 << (self.width - 1)
        self.mask = (1 << self.width) - 1
        self.units = [1 << (self.width * j) for j in range(self.nvars)]
        self.offset = sum(self.half * u for u in self.units)
        self.names = (
            [f"x{i}" for i in range(1, n + 1)]
            + [f"b{i}" for i in range(1, n)]
            + ["g"]
        )

    def pack(self, exps):
        return sum(e * u for e, u in zip(exps, self.units))

    def unpack(self, key):
        key += self.offset
        w, m, h = self.width, self.mask, self.half
        out = []
        for _ in range(self.nvars):
            out.append((key & m) - h)
            key >>= w
        return tuple(out)

    def exponent(self, key, j):
        return (((key + self.offset) >> (self.width * j)) & self.mask) - self.half

    def x_index(self, i):
        return i - 1

    def beta_index(self, i):
        return self.n + i - 1

    @property
    def gamma_index(self):
        return 2 * self.n - 1

    def param_mask_key(self, key):
        """Split a key into its coordinate part and coupling part."""
        exps = self.unpack(key)
        n = self.n
        return self.pack(exps[:n] + (0,) * n), self.pack((0,) * n + exps[n:])

    def __eq__(self, other):
        return isinstance(other, Layout) and other.n == self.n

    def __hash__(self):
        return hash(("Layout", self.n))


def _normalize(terms, den):
    """Drop zeros and cancel the common content against ``den``."""
    if den < 0:
        den = -den
        terms = {k: -c for k, c in terms.items() if c}
    else:
        terms = {k: c for k, c in terms.items() if c}
    if not terms:
        return terms, 1
    if den != 1:
        g = gcd(den, *terms.values())
        if g != 1:
            den //= g
            terms = {k: c // g for k, c in terms.items()}
    return terms, den


class Poly:
    """Sparse exact-rational Laurent polynomial: ``sum(terms[k] * mono(k)) / den``.

    Integer numerators with one shared positive denominator; ``den`` is coprime
    to the content of the numerators.
    """

    __slots__ = ("terms", "den")

    def __init__(self, terms=None, den=1, _raw=False):
        if _raw:
            self.terms = terms
            self.den = den
        else:
            self.terms, self.den = _normalize(terms or {}, den)

    @classmethod
    def const(cls, q):
        q = Fraction(q)
        if not q:
            return cls({}, 1, _raw=True)
        return cls({0: q.numerator}, q.denominator, _raw=True)

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.den == other.den and self.terms == other.terms

    def __hash__(self):
        return hash((self.den, frozenset(self.terms.items())))

    def __neg__(self):
        return Poly({k: -c for k, c in self.terms.items()}, self.den, _raw=True)

    def __add__(self, other):
        if not other.terms:
            return self
        if not self.terms:
            return other
        da, db = self.den, other.den
        if da == db:
            out = dict(self.terms)
            get = out.get
            for k, c in other.terms.items():
                out[k] = get(k, 0) + c
            return Poly(out, da)
        g = gcd(da, db)
        sa, sb = db // g, da // g
        out = {k: c * sa for k, c in self.terms.items()}
        get = out.get
        for k, c in other.terms.items():
            out[k] = get(k, 0) + c * sb
        return Poly(out, da * sa)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not self.terms or not other.terms:
            return Poly({}, 1, _raw=True)
        return Poly(mul_terms(self.terms, other.terms), self.den * other.den)

    def scale(self, q):
        q = Fraction(q)
        if not q or not self.terms:
            return Poly({}, 1, _raw=True)
        return Poly({k: c * q.numerator for k, c in self.terms.items()},
                    self.den * q.denominator)

    def shift(self, key):
        """Multiply by the monomial with packed key ``key``."""
        if not key:
            return self
        return Poly({k + key: c for k, c in self.terms.items()}, self.den, _raw=True)

    def coeff(self, key):
        return Fraction(self.terms.get(key, 0), self.den)

    def items(self):
        """Yield ``(key, Fraction)`` pairs."""
        d = self.den
        for k, c in self.terms.items():
            yield k, Fraction(c, d)

    def derive(self, layout, j):
        """Partial derivative with respect to generator ``j``."""
        unit = layout.units[j]
        out = {}
        for k, c in self.terms.items():
            e = layout.exponent(k, j)
            if e:
                out[k - unit] = c * e
        return Poly(out, self.den)

    def is_const(self):
        return not self.terms or (len(self.terms) == 1 and 0 in self.terms)

    def to_str(self, layout):
        if not self.terms:
            return "0"
        parts = []
        for k in sorted(self.terms, key=lambda k: layout.unpack(k), reverse=True):
            c = Fraction(self.terms[k], self.den)
            exps = layout.unpack(k)
            mono = "*".join(
                name if e == 1 else f"{name}^{e}"
                for name, e in zip(layout.names, exps) if e
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")


ZERO_POLY = Poly({}, 1, _raw=True)


class Ring:
    """Coefficient field over a fixed dimension ``n`` (one engine instance)."""

    def __init__(self, n):
        self.n = n
        self.layout = lay = Layout(n)
        self.sq = [2 * lay.units[j] for j in range(n)]
        self.rho = Poly({s: 1 for s in self.sq})
        self._div_args = (
            lay.offset,
            lay.width * (n - 1),
            lay.mask,
            self.sq[n - 1],
            tuple(self.sq[: n - 1]),
        )
        self.zero = FieldElem(self, ZERO_POLY, ZERO_POLY, 0)
        self.one = FieldElem(self, Poly.const(1), ZERO_POLY, 0)
        self.r = FieldElem(self, ZERO_POLY, Poly.const(1), 0)

    def __eq__(self, other):
        return isinstance(other, Ring) and other.n == self.n

    def __hash__(self):
        return hash(("Ring", self.n))

    def __repr__(self):
        return f"Ring(n={self.n})"

    # constructors -------------------------------------------------------
    def const(self, q):
        return FieldElem(self, Poly.const(q), ZERO_POLY, 0)

    def monomial(self, exps, coeff=1):
        """Monomial from a full exponent vector over all ``2n`` generators."""
        q = Fraction(coeff)
        if not q:
            return self.zero
        key = self.layout.pack(exps)
        return FieldElem(self, Poly({key: q.numerator}, q.denominator, _raw=True), ZERO_POLY, 0)

    def _gen(self, j, power=1):
        exps = [0] * self.layout.nvars
        exps[j] = power
        return self.monomial(exps)

    def x(self, i, power=1):
        if not 1 <= i <= self.n:
            raise IndexError(f"axis {i} out of range 1..{self.n}")
        return self._gen(self.layout.x_index(i), power)

    def beta(self, i):
        if not 1 <= i <= self.n - 1:
            raise IndexError(f"beta_{i} not defined for n={self.n}")
        return self._gen(self.layout.beta_index(i))

    @property
    def gamma(self):
        return self._gen(self.layout.gamma_index)

    @property
    def inv_r(self):
        """``1/r`` stored as ``r/rho``."""
        return FieldElem(self, ZERO_POLY, Poly.const(1), 1)

    def rho_elem(self):
        return FieldElem(self, self.rho, ZERO_POLY, 0)

    def poly_elem(self, poly):
        return FieldElem(self, poly, ZERO_POLY, 0)

    # rho arithmetic -----------------------------------------------------
    def divide_rho(self, poly):
        """``poly / rho`` if exact, else ``None``."""
        if not poly.terms:
            return poly
        q = rho_divide(poly.terms, *self._div_args)
        if q is None:
            return None
        return Poly(q, poly.den, _raw=True)

    def times_rho(self, poly, power=1):
        for _ in range(power):
            poly = Poly(mul_terms(poly.terms, self.rho.terms), poly.den, _raw=True)
        return poly

    def make(self, A, B, k):
        """Canonical element ``(A + B r) / rho**k`` with minimal ``k``."""
        if not A.terms and not B.terms:
            return self.zero
        if k < 0:
            A = self.times_rho(A, -k)
            B = self.times_rho(B, -k)
            k = 0
        while k > 0:
            qb = self.divide_rho(B)
            if qb is None:
                break
            qa = self.divide_rho(A)
            if qa is None:
                break
            A, B, k = qa, qb, k - 1
        return FieldElem(self, A, B, k)


class FieldElem:
    """Canonical ``(A + B*r) / rho**k``; immutable."""

    __slots__ = ("ring", "A", "B", "k", "_hash")

    def __init__(self, ring, A, B, k):
        self.ring = ring
        self.A = A
        self.B = B
        self.k = k
        self._hash = None

    def _check(self, other):
        if self.ring.n != other.ring.n:
            raise DimensionError(f"dimension mismatch: {self.ring.n} vs {other.ring.n}")

    def __bool__(self):
        return bool(self.A.terms or self.B.terms)

    def is_zero(self):
        return not (self.A.terms or self.B.terms)

    def __eq__(self, other):
        if not isinstance(other, FieldElem):
            if isinstance(other, (int, Fraction)):
                return self == self.ring.const(other)
            return NotImplemented
        return (self.ring.n == other.ring.n and self.k == other.k
                and self.A == other.A and self.B == other.B)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.k, self.A, self.B))
        return self._hash

    def __repr__(self):
        return f"FieldElem({self.to_str()})"

    def to_str(self):
        lay = self.ring.layout
        body = self.A.to_str(lay)
        if self.B.terms:
            rb = f"({self.B.to_str(lay)})*r"
            body = rb if not self.A.terms else f"{body} + {rb}"
        if self.k:
            body = f"({body})/rho^{self.k}"
        return body

    def __neg__(self):
        return FieldElem(self.ring, -self.A, -self.B, self.k)

    def __add__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        self._check(other)
        if not other:
            return self
        if not self:
            return other
        ring = self.ring
        k1, k2 = self.k, other.k
        if k1 == k2:
            return ring.make(self.A + other.A, self.B + other.B, k1)
        if k1 < k2:
            A1 = ring.times_rho(self.A, k2 - k1)
            B1 = ring.times_rho(self.B, k2 - k1)
            return ring.make(A1 + other.A, B1 + other.B, k2)
        A2 = ring.times_rho(other.A, k1 - k2)
        B2 = ring.times_rho(other.B, k1 - k2)
        return ring.make(self.A + A2, self.B + B2, k1)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        self._check(other)
        ring = self.ring
        A1, B1, A2, B2 = self.A, self.B, other.A, other.B
        k = self.k + other.k
        if not B1.terms and not B2.terms:
            if k == 0:
                return FieldElem(ring, A1 * A2, ZERO_POLY, 0)
            return ring.make(A1 * A2, ZERO_POLY, k)
        A = A1 * A2
        if B1.terms and B2.terms:
            A = A + ring.times_rho(B1 * B2)
        B = A1 * B2 + A2 * B1
        return ring.make(A, B, k)

    __rmul__ = __mul__

    def scale(self, q):
        q = Fraction(q)
        return FieldElem(self.ring, self.A.scale(q), self.B.scale(q), self.k) if q else self.ring.zero

    def derive(self, i):
        """Partial derivative along axis ``i`` (1-based), using dr/dx_i = x_i r / rho."""
        ring = self.ring
        if not 1 <= i <= ring.n:
            raise IndexError(f"axis {i} out of range 1..{ring.n}")
        lay = ring.layout
        j = lay.x_index(i)
        A, B, k = self.A, self.B, self.k
        dA = A.derive(lay, j)
        if not B.terms and k == 0:
            return FieldElem(ring, dA, ZERO_POLY, 0)
        xi = lay.units[j]
        dB = B.derive(lay, j)
        # d(A/rho^k) = (dA*rho - 2k x_i A) / rho^(k+1)
        # d(B r/rho^k) = (dB*rho + (1-2k) x_i B) r / rho^(k+1)
        newA = ring.times_rho(dA)
        if k:
            newA = newA + A.shift(xi).scale(-2 * k)
        newB = ring.times_rho(dB) + B.shift(xi).scale(1 - 2 * k)
        return ring.make(newA, newB, k + 1)

    def substitute_params(self, values):
        """Replace couplings by exact rationals: ``values`` maps generator index -> value."""
        ring = self.ring
        lay = ring.layout
        parts = []
        for P in (self.A, self.B):
            out = {}
            for key, c in P.items():
                exps = list(lay.unpack(key))
                val = c
                for j, v in values.items():
                    if exps[j]:
                        val *= Fraction(v) ** exps[j]
                        exps[j] = 0
                nk = lay.pack(exps)
                out[nk] = out.get(nk, 0) + val
            parts.append(_poly_from_fractions(out))
        return ring.make(parts[0], parts[1], self.k)

    def evaluate(self, point, params=None, r_value=None):
        """Numerically evaluate at ``point`` (coordinates) with optional couplings.

        ``r_value`` defaults to the float square root; pass an exact value when
        the point is on a rational sphere.
        """
        ring = self.ring
        lay = ring.layout
        params = params or {}
        # ints become Fractions so negative exponents stay exact
        full = [Fraction(v) if isinstance(v, int) else v for v in point]
        full += [params.get(j, None) for j in range(ring.n, lay.nvars)]
        full = [Fraction(v) if isinstance(v, int) else v for v in full]
        rho = sum(Fraction(v) ** 2 if isinstance(v, (int, Fraction)) else v * v for v in point)
        if r_value is None:
            r_value = float(rho) ** 0.5

        def ev(P):
            total = 0
            for key, c in P.items():
                term = c
                for e, v in zip(lay.unpack(key), full):
                    if e:
                        if v is None:
                            raise ValueError("missing coupling value")
                        term = term * v ** e
                total = total + term
            return total

        return (ev(self.A) + ev(self.B) * r_value) / rho ** self.k


def _poly_from_fractions(d):
    """Poly from ``{key: Fraction}``."""
    den = 1
    for c in d.values():
        den = den * Fraction(c).denominator // gcd(den, Fraction(c).denominator)
    return Poly({k: int(Fraction(c) * den) for k, c in d.items()}, den)


def poly_from_fractions(d):
    return _poly_from_fractions(d)


def multi_indices_below(alpha):
    """All multi-indices ``nu <= alpha`` componentwise."""
    return product(*(range(a + 1) for a in alpha))
