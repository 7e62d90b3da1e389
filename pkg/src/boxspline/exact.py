"""Exact rational linear algebra.

Elimination runs on integer rows (each row is scaled to clear denominators
and kept primitive by dividing out the gcd), which is much faster than
Fraction arithmetic and still exact.  Pivots are the first nonzero entry in
column order.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import List, Optional, Sequence, Tuple

from .errors import DimensionMismatch


class RationalMatrix:
    """Dense matrix with Fraction entries."""

    __slots__ = ("rows", "ncols")

    def __init__(self, rows: Sequence[Sequence], ncols: Optional[int] = None):
        rows = [tuple(Fraction(x) for x in r) for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("ncols is required for a matrix without rows")
            ncols = len(rows[0])
        for r in rows:
            if len(r) != ncols:
                raise DimensionMismatch(f"row of length {len(r)} in a {ncols}-column matrix")
        self.rows: Tuple[Tuple[Fraction, ...], ...] = tuple(rows)
        self.ncols = ncols

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> Tuple[int, int]:
        return (len(self.rows), self.ncols)

    def __eq__(self, other):
        return isinstance(other, RationalMatrix) and self.ncols == other.ncols and self.rows == other.rows

    def __repr__(self):
        return f"RationalMatrix({[list(map(str, r)) for r in self.rows]}, ncols={self.ncols})"

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def transpose(self) -> "RationalMatrix":
        cols = [list(c) for c in zip(*self.rows)] if self.rows else [[] for _ in range(self.ncols)]
        return RationalMatrix(cols, len(self.rows))

    def matmul(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.nrows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        cols = list(zip(*other.rows)) if other.rows else []
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            out.append([sum((a * c[k] for k, a in nz), Fraction(0)) for c in cols])
        return RationalMatrix(out, other.ncols)

    def apply(self, v: Sequence) -> List[Fraction]:
        if len(v) != self.ncols:
            raise DimensionMismatch(f"vector of length {len(v)} for {self.ncols} columns")
        return [sum((a * Fraction(x) for a, x in zip(r, v) if a), Fraction(0)) for r in self.rows]

    def vstack(self, other: "RationalMatrix") -> "RationalMatrix":
        if self.ncols != other.ncols:
            raise DimensionMismatch("column counts differ")
        return RationalMatrix(self.rows + other.rows, self.ncols)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> "RationalMatrix":
        return cls([[0] * ncols for _ in range(nrows)], ncols)

    @classmethod
    def identity(cls, n: int) -> "RationalMatrix":
        return cls([[1 if i == j else 0 for j in range(n)] for i in range(n)], n)

    def to_csv(self) -> str:
        return "\n".join(",".join(str(x) for x in r) for r in self.rows)


def _as_rows(A) -> Tuple[List[List[Fraction]], int]:
    if isinstance(A, RationalMatrix):
        return [list(r) for r in A.rows], A.ncols
    rows = [[Fraction(x) for x in r] for r in A]
    return rows, (len(rows[0]) if rows else 0)


def _integer_row(r: Sequence[Fraction]) -> List[int]:
    den = 1
    for x in r:
        if x:
            den = lcm(den, Fraction(x).denominator)
    out = [int(Fraction(x) * den) for x in r]
    return _primitive(out)


def _primitive(r: List[int]) -> List[int]:
    g = 0
    for x in r:
        if x:
            g = gcd(g, x)
            if g == 1:
                return r
    if g > 1:
        return [x // g for x in r]
    return r


def _eliminate(rows: List[List[int]], ncols: int, reduce_above: bool) -> Tuple[List[List[int]], List[int]]:
    """Integer Gauss(-Jordan) elimination in place; returns (rows, pivots)."""
    pivots: List[int] = []
    rank = 0
    nrows = len(rows)
    for col in range(ncols):
        if rank == nrows:
            break
        piv = None
        for r in range(rank, nrows):
            if rows[r][col]:
                piv = r
                break
        if piv is None:
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        prow = rows[rank]
        p = prow[col]
        nz = [k for k in range(col, ncols) if prow[k]]
        targets = range(nrows) if reduce_above else range(rank + 1, nrows)
        for r in targets:
            if r == rank:
                continue
            row = rows[r]
            a = row[col]
            if not a:
                continue
            g = gcd(p, a)
            mp, ma = p // g, a // g
            if mp != 1:
                row = [x * mp for x in row]
            for k in nz:
                row[k] -= ma * prow[k]
            rows[r] = _primitive(row)
        pivots.append(col)
        rank += 1
    return rows, pivots


def rref(A) -> Tuple[RationalMatrix, List[int]]:
    """Reduced row echelon form and the list of pivot columns."""
    rows, ncols = _as_rows(A)
    irows = [_integer_row(r) for r in rows]
    irows, pivots = _eliminate(irows, ncols, reduce_above=True)
    out = []
    for k, col in enumerate(pivots):
        p = irows[k][col]
        out.append([Fraction(x, p) for x in irows[k]])
    out.extend([[Fraction(0)] * ncols for _ in range(len(rows) - len(pivots))])
    return RationalMatrix(out, ncols), pivots


def rank(A) -> int:
    rows, ncols = _as_rows(A)
    irows = [_integer_row(r) for r in rows if any(r)]
    _, pivots = _eliminate(irows, ncols, reduce_above=False)
    return len(pivots)


def _rref_nonzero(A) -> Tuple[List[List[Fraction]], List[int], int]:
    R, pivots = rref(A)
    return [list(R.rows[k]) for k in range(len(pivots))], pivots, R.ncols


def kernel_basis(A) -> List[List[Fraction]]:
    """Basis of {x : A x = 0}, one vector per free column."""
    rows, pivots, ncols = _rref_nonzero(A)
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [Fraction(0)] * ncols
        v[free] = Fraction(1)
        for k, pc in enumerate(pivots):
            v[pc] = -rows[k][free]
        basis.append(v)
    return basis


def solve(A, b: Sequence) -> Optional[List[Fraction]]:
    """Some x with A x = b (free variables set to zero), or None."""
    rows, ncols = _as_rows(A)
    if len(b) != len(rows):
        raise DimensionMismatch(f"right-hand side of length {len(b)} for {len(rows)} rows")
    aug = [r + [Fraction(x)] for r, x in zip(rows, b)]
    R, pivots = rref(RationalMatrix(aug, ncols + 1)) if aug else (None, [])
    if ncols in pivots:
        return None
    x = [Fraction(0)] * ncols
    for k, pc in enumerate(pivots):
        x[pc] = R.rows[k][ncols]
    return x


def row_space_equal(A, B) -> bool:
    ra, na = _as_rows(A)
    rb, nb = _as_rows(B)
    if na != nb:
        raise DimensionMismatch(f"column counts differ: {na} vs {nb}")
    Ra, pa = rref(RationalMatrix(ra, na))
    Rb, pb = rref(RationalMatrix(rb, nb))
    return pa == pb and Ra.rows[:len(pa)] == Rb.rows[:len(pb)]


def left_inverse_on_rows(L) -> Tuple[List[int], RationalMatrix]:
    """For a full-row-rank ``L`` (k x m) return pivot columns ``P`` and the
    inverse ``S^-1`` of the square block ``S = L[:, P]``.

    Any ``c`` in the row space of ``L`` then has coordinates
    ``lam = c[P] @ S^-1`` with respect to the rows of ``L``.
    """
    rows, ncols = _as_rows(L)
    k = len(rows)
    _, piv_rows = rref(RationalMatrix(rows, ncols))
    if len(piv_rows) != k:
        raise ValueError("matrix does not have full row rank")
    S = [[rows[i][c] for c in piv_rows] for i in range(k)]
    aug = [S[i] + [Fraction(int(i == j)) for j in range(k)] for i in range(k)]
    R, _ = rref(RationalMatrix(aug, 2 * k))
    inv = [list(R.rows[i][k:]) for i in range(k)]
    return piv_rows, RationalMatrix(inv, k)
