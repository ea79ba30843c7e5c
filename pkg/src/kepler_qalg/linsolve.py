"""Exact sparse linear solving over the rationals.

Rows are fed one at a time into a reduced row-echelon basis.  Pivots are taken
at the lowest column index, so when the system is underdetermined the free
(unpivoted) columns are the high-index ones and are set to zero.
"""

from fractions import Fraction


class Inconsistent(ArithmeticError):
    """A row reduced to ``0 = c`` with ``c != 0``."""

    def __init__(self, row_id):
        super().__init__(f"inconsistent equation {row_id!r}")
        self.row_id = row_id


class EchelonSolver:
    """Incremental RREF over ``Fraction``.

    ``pivots`` maps a pivot column to its row ``(coeffs, rhs)`` where
    ``coeffs[pivot] == 1`` and no other pivot column appears.
    """

    def __init__(self):
        self.pivots = {}
        self.rows_seen = 0

    @property
    def rank(self):
        return len(self.pivots)

    def add_row(self, coeffs, rhs, row_id=None):
        """Insert one equation ``sum(coeffs[c] * v_c) == rhs``.

        Returns ``True`` if the rank grew.  Raises :class:`Inconsistent`.
        """
        self.rows_seen += 1
        row = {c: Fraction(v) for c, v in coeffs.items() if v}
        rhs = Fraction(rhs)
        for col in [c for c in row if c in self.pivots]:
            f = row.get(col)
            if not f:
                continue
            prow, prhs = self.pivots[col]
            for c, v in prow.items():
                nv = row.get(c, 0) - f * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            rhs -= f * prhs
        if not row:
            if rhs:
                raise Inconsistent(row_id)
            return False
        piv = min(row)
        inv = 1 / row[piv]
        row = {c: v * inv for c, v in row.items()}
        rhs *= inv
        # keep the basis fully reduced
        for pc, (prow, prhs) in self.pivots.items():
            f = prow.get(piv)
            if not f:
                continue
            for c, v in row.items():
                nv = prow.get(c, 0) - f * v
                if nv:
                    prow[c] = nv
                else:
                    prow.pop(c, None)
            self.pivots[pc] = (prow, prhs - f * rhs)
        self.pivots[piv] = (row, rhs)
        return True

    def solution(self):
        """Particular solution with every free column at zero."""
        return {c: rhs for c, (row, rhs) in self.pivots.items() if rhs}


def solve(rows, ncols=None):
    """Solve a list of ``(coeffs, rhs)`` equations; returns ``{col: value}``."""
    s = EchelonSolver()
    for idx, (coeffs, rhs) in enumerate(rows):
        s.add_row(coeffs, rhs, idx)
    return s.solution()
