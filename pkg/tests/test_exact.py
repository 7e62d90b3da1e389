from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from boxspline.errors import DimensionMismatch
from boxspline.exact import RationalMatrix, kernel_basis, rank, row_space_equal, rref, solve


def M(rows, ncols=None):
    return RationalMatrix([[Fraction(x) for x in r] for r in rows], ncols if ncols is not None else len(rows[0]))


small = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def matrices(draw, max_rows=5, max_cols=5):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(1, max_cols))
    # bias toward rank deficiency by drawing a few rows and combining them
    base = [draw(st.lists(small, min_size=c, max_size=c)) for _ in range(draw(st.integers(0, 3)))]
    rows = []
    for _ in range(r):
        if base and draw(st.booleans()):
            coefs = draw(st.lists(st.integers(-2, 2), min_size=len(base), max_size=len(base)))
            rows.append([sum(k * b[j] for k, b in zip(coefs, base)) for j in range(c)])
        else:
            rows.append(draw(st.lists(small, min_size=c, max_size=c)))
    return RationalMatrix(rows, c)


def L(A: RationalMatrix):
    return [list(r) for r in A.rows]


def to_sympy(A: RationalMatrix):
    return sympy.Matrix(A.nrows, A.ncols, lambda i, j: sympy.Rational(A.rows[i][j].numerator, A.rows[i][j].denominator))


def test_rref_examples():
    R, piv = rref(M([[1, 0], [0, 1]]))
    assert L(R) == [[1, 0], [0, 1]] and list(piv) == [0, 1]
    R, piv = rref(M([[2, 4], [1, 2]]))
    assert L(R) == [[1, 2], [0, 0]] and list(piv) == [0]
    R, piv = rref(M([[0, 0], [0, 0]]))
    assert L(R) == [[0, 0], [0, 0]] and list(piv) == []


def test_kernel_examples():
    assert kernel_basis(M([[1, 0], [0, 1]])) == []
    (v,) = kernel_basis(M([[1, 1]]))
    assert v[0] == -v[1] != 0
    assert len(kernel_basis(RationalMatrix([], 3))) == 3


def test_solve_examples():
    assert solve(M([[1, 0], [0, 1]]), [3, Fraction(-1, 2)]) == [3, Fraction(-1, 2)]
    assert solve(M([[1, 2], [2, 4]]), [1, 3]) is None
    x = solve(M([[1, 0], [0, 0]]), [5, 0])
    assert x[0] == 5
    with pytest.raises(DimensionMismatch):
        solve(M([[1, 0]]), [1, 2])


def test_row_space_examples():
    A = M([[1, 2, 3], [0, 1, 1]])
    assert row_space_equal(A, M([[0, 1, 1], [1, 2, 3]]))
    assert not row_space_equal(M([[1, 0]]), M([[0, 1]]))
    assert row_space_equal(A, M([[2, 5, 7], [3, 7, 10]]))
    with pytest.raises(DimensionMismatch):
        row_space_equal(M([[1, 0]]), M([[1, 0, 0]]))


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rref_matches_sympy(A):
    R, piv = rref(A)
    S, spiv = to_sympy(A).rref()
    assert list(piv) == list(spiv)
    for i in range(A.nrows):
        assert [sympy.Rational(x.numerator, x.denominator) for x in R.rows[i]] == list(S.row(i))


@settings(max_examples=60, deadline=None)
@given(matrices())
def test_rank_and_kernel(A):
    r = rank(A)
    assert r == to_sympy(A).rank()
    K = kernel_basis(A)
    assert r + len(K) == A.ncols
    for v in K:
        assert all(x == 0 for x in A.apply(v))
    R, _ = rref(A)
    assert rref(R)[0].rows == R.rows


@settings(max_examples=40, deadline=None)
@given(matrices(), st.lists(st.integers(-3, 3), min_size=5, max_size=5))
def test_solve_consistent(A, coefs):
    x0 = [Fraction(c) for c in coefs[:A.ncols]] + [Fraction(0)] * max(0, A.ncols - 5)
    b = A.apply(x0)
    x = solve(A, b)
    assert x is not None and A.apply(x) == b


@settings(max_examples=40, deadline=None)
@given(matrices(max_rows=4))
def test_row_space_invariant_under_row_operations(A):
    if A.nrows < 2:
        return
    rows = [list(r) for r in A.rows]
    rows[0] = [a + 3 * b for a, b in zip(rows[0], rows[1])]
    rows[1] = [Fraction(-2) * x for x in rows[1]]
    rows.reverse()
    assert row_space_equal(A, RationalMatrix(rows, A.ncols))


def test_matrix_helpers():
    A = M([[1, 2], [3, 4]])
    assert L(A.transpose()) == [[1, 3], [2, 4]]
    assert A.matmul(RationalMatrix.identity(2)).rows == A.rows
    assert A.shape == (2, 2)
    assert A.to_csv() == "1,2\n3,4"
