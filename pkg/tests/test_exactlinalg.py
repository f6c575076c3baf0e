from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from bvtwist.exactlinalg import (ComplexError, MatrixComplex, RationalMatrix, cohomology_dims, image_basis,
                                 intersect_spans, kernel_basis, rank, rref, solve, span_rank)

small = st.fractions(min_value=-4, max_value=4, max_denominator=3)


@st.composite
def matrices(draw, max_rows=6, max_cols=6):
    r = draw(st.integers(0, max_rows))
    c = draw(st.integers(0, max_cols))
    rows = [[draw(st.one_of(st.just(Fraction(0)), small)) for _ in range(c)] for _ in range(r)]
    return RationalMatrix.from_rows(rows, ncols=c)


def to_sympy(m: RationalMatrix):
    return sympy.Matrix(m.nrows, m.ncols, lambda i, j: sympy.Rational(m[i, j].numerator, m[i, j].denominator))


@settings(max_examples=150, deadline=None)
@given(matrices())
def test_rank_matches_sympy(m):
    assert rank(m) == (to_sympy(m).rank() if m.nrows and m.ncols else 0)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_rank_nullity(m):
    ker = kernel_basis(m)
    assert rank(m) + len(ker) == m.ncols
    for v in ker:
        assert not m.apply(v)


@settings(max_examples=100, deadline=None)
@given(matrices())
def test_image_spans_columns(m):
    im = image_basis(m)
    assert len(im) == rank(m)
    assert span_rank(list(im) + m.columns()) == len(im)


@settings(max_examples=100, deadline=None)
@given(matrices(), st.data())
def test_solve_roundtrip(m, data):
    x = [data.draw(small) for _ in range(m.ncols)]
    b = m.apply(x)
    sol = solve(m, b)
    assert sol is not None
    assert m.apply(sol) == b


def test_solve_inconsistent():
    m = RationalMatrix.from_rows([[1, 1], [2, 2]])
    assert solve(m, [1, 0]) is None


def test_rref_is_reduced():
    piv, rows = rref([{0: 2, 1: 4}, {0: 1, 1: 2, 2: 1}, {2: 3}])
    assert piv == [0, 2]
    assert rows[0] == {0: 1, 1: 2}
    assert rows[1] == {2: 1}


def test_intersect_spans():
    u = [{0: Fraction(1)}, {1: Fraction(1)}]
    w = [{1: Fraction(1), 2: Fraction(1)}, {0: Fraction(1), 2: Fraction(-1)}]
    both = intersect_spans(u, w, 3)
    assert len(both) == 1
    v = both[0]
    assert v.get(2, 0) == 0 and v.get(0, 0) == v.get(1, 0)


def test_matrix_arithmetic():
    a = RationalMatrix.from_rows([[1, 2], [3, 4]])
    b = RationalMatrix.identity(2)
    assert a @ b == a
    assert (a - a).is_zero()
    assert a.T[0, 1] == 3
    assert a.trace() == 5
    assert a.power(2) == a @ a
    assert RationalMatrix.block_diag([a, b]).shape == (4, 4)


def test_shape_errors():
    with pytest.raises(ValueError):
        RationalMatrix.from_rows([[1, 2]]) @ RationalMatrix.from_rows([[1, 2]])
    with pytest.raises(IndexError):
        RationalMatrix(1, 1, [{3: 1}])


def test_complex_cohomology_of_circle():
    # cellular cochains of S^1 with one vertex and one edge
    c = MatrixComplex([1, 1], [RationalMatrix.zeros(1, 1)])
    assert cohomology_dims(c) == {0: 1, 1: 1}
    assert c.euler_characteristic() == 0


def test_complex_rejects_nonzero_square():
    d0 = RationalMatrix.from_rows([[1]])
    d1 = RationalMatrix.from_rows([[1]])
    with pytest.raises(ComplexError):
        MatrixComplex([1, 1, 1], [d0, d1])


def test_periodic_complex():
    d = RationalMatrix.from_rows([[0, 1], [0, 0]])
    c = MatrixComplex([2, 2], [d, d], periodic=True)
    # ker of each map is the image of the other
    assert cohomology_dims(c) == {0: 0, 1: 0}


def test_periodic_nonzero_cohomology():
    c = MatrixComplex([2, 1], [RationalMatrix.zeros(1, 2), RationalMatrix.from_rows([[1], [0]])], periodic=True)
    assert cohomology_dims(c) == {0: 1, 1: 0}
