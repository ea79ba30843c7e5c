"""Energy spectrum from the chain of deformed oscillators.

The boundary conditions fix ``u_1 = 1/2 + m_{n-2}`` and
``E = -2 g^2 / (2 + 2p + 2 m_{n-2})^2``; the ``m`` values come from the
recursion ``m_{i-1} = m_{i-2} + 2 n_i + v_i + 1`` started at
``m_1 = 2 n_2 + v_1 + v_2 + 1``.  The separation-of-variables formula
``E = -g^2 / (2 (N_1 + N_2 + 2 sum J_i + sum p_i + (n-1)/2)^2)`` is an
independent oracle, matched by ``p = N_1 + N_2``, ``n_i = J_{i-1}`` and
``v_i = p_i - 1/2``.

Energies are exact rationals; ``gamma`` must be rational (use ``gamma = 1``
to read off the coefficient of ``gamma**2``).
"""

from dataclasses import dataclass, field
from fractions import Fraction

HALF = Fraction(1, 2)


@dataclass(frozen=True)
class QuantumNumbers:
    """``p``, ``n_2 .. n_{n-1}`` and ``v_1 .. v_{n-1}``."""

    p: int
    ns: tuple  # n_j for j = 2 .. n-1
    vs: tuple  # v_i for i = 1 .. n-1

    def __post_init__(self):
        if self.p < 0 or any(x < 0 for x in self.ns):
            raise ValueError("p and n_j must be nonnegative")
        object.__setattr__(self, "ns", tuple(int(x) for x in self.ns))
        object.__setattr__(self, "vs", tuple(Fraction(x) for x in self.vs))
        if len(self.vs) != len(self.ns) + 1:
            raise ValueError("need one more v_i than n_j (v_1..v_{n-1}, n_2..n_{n-1})")

    @property
    def n(self):
        return len(self.vs) + 1

    @classmethod
    def from_p(cls, p, ns, pvals):
        """``v_i = p_i - 1/2``."""
        return cls(p, tuple(ns), tuple(Fraction(x) - HALF for x in pvals))


@dataclass(frozen=True)
class SovNumbers:
    """``N_1, N_2``, ``J_1 .. J_{n-2}`` and ``p_1 .. p_{n-1}``."""

    N1: int
    N2: int
    J: tuple
    pvals: tuple

    def __post_init__(self):
        if self.N1 < 0 or self.N2 < 0 or any(x < 0 for x in self.J):
            raise ValueError("N_1, N_2, J_i must be nonnegative")
        object.__setattr__(self, "J", tuple(int(x) for x in self.J))
        object.__setattr__(self, "pvals", tuple(Fraction(x) for x in self.pvals))
        if len(self.pvals) != len(self.J) + 1:
            raise ValueError("need p_1..p_{n-1} and J_1..J_{n-2}")

    @property
    def n(self):
        return len(self.pvals) + 1

    def to_algebraic(self):
        """``p = N_1 + N_2``, ``n_i = J_{i-1}``, ``v_i = p_i - 1/2``."""
        return QuantumNumbers.from_p(self.N1 + self.N2, self.J, self.pvals)


@dataclass
class Level:
    D: Fraction  # principal quantity
    energy: Fraction  # -gamma^2 / (2 D^2)
    coefficient: Fraction  # energy / gamma^2
    degeneracy_algebraic: int
    degeneracy_sov: int
    states: list = field(default_factory=list)  # contributing (p, n_2..n_{n-1})


def _check_n(qn, n):
    if n is not None and n != qn.n:
        raise ValueError(f"quantum numbers are for n={qn.n}, not {n}")
    return qn.n


def m_chain(qn, n=None):
    """``[m_1, ..., m_{n-2}]`` from the recursion (empty for ``n = 2``)."""
    n = _check_n(qn, n)
    if n < 3:
        return []
    v = qn.vs  # v[0] is v_1
    nj = dict(zip(range(2, n), qn.ns))
    m = [2 * nj[2] + v[0] + v[1] + 1]
    for i in range(3, n):
        m.append(m[-1] + 2 * nj[i] + v[i - 1] + 1)
    return m


def m_closed(qn, n=None):
    """``m_{n-2} = 2 sum n_j + sum v_i + (n - 2)``; for ``n = 2`` this is ``m_0 = v_1``."""
    n = _check_n(qn, n)
    return 2 * sum(qn.ns) + sum(qn.vs) + (n - 2)


def m_last(qn, n=None):
    """``m_{n-2}`` via the recursion (``m_0 = v_1`` when ``n = 2``)."""
    n = _check_n(qn, n)
    if n == 2:
        return qn.vs[0]
    return m_chain(qn, n)[-1]


def principal(qn):
    """``D = p + 2 sum n_j + sum v_i + (n - 1)``."""
    return qn.p + 2 * sum(qn.ns) + sum(qn.vs) + (qn.n - 1)


def energy_from_m(p, m, gamma):
    """``E = -2 g^2 / (2 + 2p + 2m)^2``."""
    den = (2 + 2 * p + 2 * Fraction(m)) ** 2
    if den == 0:
        raise ZeroDivisionError("2 + 2p + 2m = 0")
    return -2 * Fraction(gamma) ** 2 / den


def energy_algebraic(qn, n=None, gamma=1):
    """Energy from the m-chain; cross-checked against the closed formula."""
    n = _check_n(qn, n)
    via_chain = energy_from_m(qn.p, m_last(qn, n), gamma)
    D = principal(qn)
    if D == 0:
        raise ZeroDivisionError("principal quantity is zero")
    closed = -Fraction(gamma) ** 2 / (2 * D ** 2)
    if via_chain != closed:  # pragma: no cover - an algebra bug, not an input error
        raise ArithmeticError(f"chain energy {via_chain} != closed form {closed}")
    return closed


def sov_principal(sn):
    return sn.N1 + sn.N2 + 2 * sum(sn.J) + sum(sn.pvals) + Fraction(sn.n - 1, 2)


def energy_sov(sn, n=None, gamma=1):
    """Separation-of-variables energy."""
    if n is not None and n != sn.n:
        raise ValueError(f"quantum numbers are for n={sn.n}, not {n}")
    D = sov_principal(sn)
    if D == 0:
        raise ZeroDivisionError("principal quantity is zero")
    return -Fraction(gamma) ** 2 / (2 * D ** 2)


def _compositions(total, parts):
    """Nonnegative integer tuples of length ``parts`` summing to ``total``."""
    if parts == 0:
        if total == 0:
            yield ()
        return
    if parts == 1:
        yield (total,)
        return
    for a in range(total + 1):
        for rest in _compositions(total - a, parts - 1):
            yield (a,) + rest


def enumerate_levels(n, pvals, gamma=1, bound=None, n_lower=0):
    """Bound states with principal quantity ``D <= bound``, lowest energy first.

    ``degeneracy_algebraic`` counts tuples ``(p, n_2 .. n_{n-1})``;
    ``degeneracy_sov`` counts ``(N_1, N_2, J_1 .. J_{n-2})`` with
    ``N_1, N_2 >= n_lower``.
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    pvals = tuple(Fraction(x) for x in pvals)
    if len(pvals) != n - 1:
        raise ValueError(f"need {n - 1} values p_1..p_{n-1}")
    if bound is None:
        raise ValueError("bound on the principal quantity is required")
    bound = Fraction(bound)
    vs = tuple(x - HALF for x in pvals)
    base = sum(vs) + (n - 1)  # D of the all-zero tuple
    if bound < base:
        return []
    # D = base + p + 2 sum n_j, so the integer part k = D - base is bounded
    kmax = int((bound - base) // 1)
    levels = {}
    for k in range(kmax + 1):
        D = base + k
        if D == 0:
            continue
        states = []
        for s in range(k // 2 + 1):
            p = k - 2 * s
            for ns in _compositions(s, n - 2):
                states.append((p,) + ns)
        sov = 0
        for N1N2 in range(2 * n_lower, k + 1):
            rest = k - N1N2
            if rest % 2:
                continue
            pairs = N1N2 - 2 * n_lower + 1
            sov += pairs * sum(1 for _ in _compositions(rest // 2, n - 2))
        E = -Fraction(gamma) ** 2 / (2 * D ** 2)
        levels[D] = Level(D, E, -1 / (2 * D ** 2), len(states), sov, states)
    return sorted(levels.values(), key=lambda lv: (lv.energy, lv.D))


def levels_from_beta(n, betas, gamma=1, bound=None, branch=None, n_lower=0):
    """Like :func:`enumerate_levels` but from couplings ``beta_i``.

    ``v_i**2 = (1 + 8 beta_i)/4`` has two roots; ``branch`` (``+1``/``-1``,
    or a sequence per ``i``) must be given explicitly.
    """
    from .oscillator import v_from_beta

    if branch is None:
        raise ValueError("choose the branch of v_i = +-sqrt((1 + 8 beta_i)/4) explicitly")
    branches = [branch] * len(betas) if isinstance(branch, int) else list(branch)
    pvals = [v_from_beta(b, s) + HALF for b, s in zip(betas, branches)]
    return enumerate_levels(n, pvals, gamma, bound, n_lower)


def sweep_sov_agreement(n, pvals, kmax, n_lower=0):
    """Check algebraic = SoV energies for every SoV tuple with excitation
    ``N_1 + N_2 + 2 sum J_i <= kmax`` (a superset of ``D <= kmax`` when ``p_i >= 0``).

    Returns the number of tuples checked; raises ``AssertionError`` on mismatch.
    """
    pvals = tuple(Fraction(x) for x in pvals)
    count = 0
    for k in range(kmax + 1):
        for a in range(k + 1):  # a = (N_1 - lo) + (N_2 - lo)
            if (k - a) % 2:
                continue
            for N1 in range(n_lower, n_lower + a + 1):
                N2 = n_lower + a - (N1 - n_lower)
                for J in _compositions((k - a) // 2, n - 2):
                    sn = SovNumbers(N1, N2, J, pvals)
                    if sov_principal(sn) == 0:
                        continue
                    e1 = energy_sov(sn)
                    e2 = energy_algebraic(sn.to_algebraic())
                    if e1 != e2:
                        raise AssertionError(f"mismatch at {sn}: sov {e1} vs algebraic {e2}")
                    count += 1
    return count


__all__ = [
    "Level",
    "QuantumNumbers",
    "SovNumbers",
    "energy_algebraic",
    "energy_from_m",
    "energy_sov",
    "enumerate_levels",
    "levels_from_beta",
    "m_chain",
    "m_closed",
    "m_last",
    "principal",
    "sov_principal",
    "sweep_sov_agreement",
]
