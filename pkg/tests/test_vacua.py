from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings, strategies as st

from bvtwist.dg_lie import TwistPoint, jet_cdga, point_cdga, preset
from bvtwist.exactlinalg import RationalMatrix
from bvtwist.vacua import (VACUUM_CATALOGUE, VacuumPoint, breaking_decomposition, broken_theory_check,
                           catalogue_point, centralizer, char_poly_coefficients, coarse_moduli_map, conjugate,
                           point_from_matrix)


def sympy_centralizer_dim(M, traceless):
    n = len(M)
    X = sympy.Matrix(n, n, sympy.symbols(f"x0:{n * n}"))
    A = sympy.Matrix(M)
    eqs = list(A * X - X * A)
    if traceless:
        eqs.append(X.trace())
    J = sympy.Matrix([[sympy.diff(e, s) for s in X] for e in eqs])
    return n * n - J.rank()


@pytest.mark.parametrize("alg,label,kind,M", VACUUM_CATALOGUE)
def test_catalogue_centralizers(alg, label, kind, M):
    p, k = catalogue_point(alg, label)
    assert k == kind
    assert len(centralizer(p)) == sympy_centralizer_dim(M, alg.startswith("sl"))


@pytest.mark.parametrize("alg,label,kind,M", VACUUM_CATALOGUE)
def test_breaking_decomposition(alg, label, kind, M):
    p, _ = catalogue_point(alg, label)
    bd = breaking_decomposition(p)
    for key in ("dimension", "orthogonal", "skew_adjoint"):
        assert bd.checks[key]
    assert bd.checks["direct_sum"] == (kind != "nilpotent")


@pytest.mark.parametrize("alg,label,kind,M", [c for c in VACUUM_CATALOGUE if c[2] != "nilpotent"])
def test_broken_theory_semisimple(alg, label, kind, M):
    p, _ = catalogue_point(alg, label)
    rep = broken_theory_check(p, point_cdga(), TwistPoint(0, 0, 0))
    assert rep["constructed"] and rep["passed"], rep


def test_broken_theory_nilpotent_u_zero_matches():
    p, _ = catalogue_point("gl2", "nilpotent")
    assert broken_theory_check(p, jet_cdga(1), TwistPoint(1, 0, 0))["passed"]


def test_broken_theory_nilpotent_u_refused_is_reported():
    p, _ = catalogue_point("gl2", "nilpotent")
    rep = broken_theory_check(p, point_cdga(), TwistPoint(0, 0, 1))
    assert rep["constructed"] is False and not rep["passed"]


def test_char_poly_against_sympy():
    M = [[1, 2, 0], [0, 3, 1], [4, 0, -1]]
    e = char_poly_coefficients(RationalMatrix.from_rows(M))
    t = sympy.symbols("t")
    coeffs = sympy.Poly(sympy.Matrix(M).charpoly(t).as_expr(), t).all_coeffs()
    assert [Fraction(int(c)) for c in coeffs[1:]] == [(-1) ** (k + 1) * e[k] for k in range(3)]


invertible = st.lists(st.integers(-3, 3), min_size=4, max_size=4).filter(lambda v: v[0] * v[3] - v[1] * v[2] != 0)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-4, 4), min_size=4, max_size=4), invertible)
def test_coarse_map_is_conjugation_invariant(x, s):
    g = preset("gl2")
    p = point_from_matrix(g, [x[:2], x[2:]])
    q = conjugate(p, [s[:2], s[2:]])
    assert coarse_moduli_map(p) == coarse_moduli_map(q)
    assert len(centralizer(p)) == len(centralizer(q))


def test_point_roundtrip_and_errors():
    g = preset("sl2")
    p = point_from_matrix(g, [[1, 2], [3, -1]])
    assert p.matrix() == RationalMatrix.from_rows([[1, 2], [3, -1]])
    with pytest.raises(ValueError):
        point_from_matrix(g, [[1, 0], [0, 0]])
    with pytest.raises(ValueError):
        VacuumPoint(g, [1, 2])
    with pytest.raises(ValueError):
        conjugate(p, [[1, 1], [1, 1]])
    with pytest.raises(KeyError):
        catalogue_point("gl2", "nope")
