from math import comb

import pytest
import sympy

from bvtwist.ce_complex import ModuleSpec, augmentation_filtration, build_ce, ce_cohomology, invariant_dimension
from bvtwist.dg_lie import cohomology_cdga, epsilon_extend, hodge_family, preset, tensor_with_cdga
from bvtwist.exactlinalg import ComplexError


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_abelian_cohomology_is_binomial(n):
    res = ce_cohomology(build_ce(preset(f"abelian:{n}")))
    assert res.as_list() == [comb(n, k) for k in range(n + 1)]
    assert set(res.flags.values()) == {"exact"}


def test_sl2_cohomology():
    assert ce_cohomology(build_ce(preset("sl2"))).as_list() == [1, 0, 0, 1]


def test_gl2_cohomology_is_sl2_times_circle():
    # H(gl2) = H(sl2) ⊗ Λ[one generator]
    assert ce_cohomology(build_ce(preset("gl2"))).as_list() == [1, 1, 0, 1, 1]


def test_sl3_cohomology_low_degrees():
    res = ce_cohomology(build_ce(preset("sl3"), max_weight=8, degree_window=(0, 8)))
    assert res.as_list() == [1, 0, 0, 1, 0, 1, 0, 0, 1]


def test_square_report_all_green():
    c = build_ce(preset("gl2"))
    assert c.square_report() == {"d_squared": True, "d0_squared": True, "mixed": True}


def test_weight_blocks():
    c = build_ce(preset("sl2"))
    dims = c.block_dims()
    assert dims[(1, 1, 0)] == 3
    assert dims[(2, 2, 0)] == 3


def sympy_invariant_forms(g) -> int:
    """Independent count of ad-invariant symmetric bilinear forms."""
    n = g.dim
    syms = sympy.symbols(f"b0:{n * (n + 1) // 2}")
    B = sympy.zeros(n, n)
    k = 0
    for i in range(n):
        for j in range(i, n):
            B[i, j] = B[j, i] = syms[k]
            k += 1
    eqs = []
    for i in range(n):
        A = g.ad_basis(i)
        Ad = sympy.Matrix(n, n, lambda r, c: sympy.Rational(A[r, c].numerator, A[r, c].denominator))
        eqs.extend(list(Ad.T * B + B * Ad))
    M = sympy.Matrix([[sympy.diff(e, s) for s in syms] for e in eqs if e != 0])
    return len(syms) - (M.rank() if M.rows else 0)


@pytest.mark.parametrize("name,expected", [("sl2", 1), ("gl2", 2), ("sl3", 1), ("so4", 2)])
def test_quadratic_invariants(name, expected):
    g = preset(name)
    got = invariant_dimension(g, ModuleSpec.coadjoint(g), 2)
    assert got == expected
    assert sympy_invariant_forms(g) == expected


def test_coadjoint_degree_zero_is_invariants():
    g = preset("sl2")
    c = build_ce(g, ModuleSpec.coadjoint(g, (1,)), max_weight=3, degree_window=(0, 3))
    # H^k(sl2; sl2*) vanishes for the simple algebra by Whitehead
    assert ce_cohomology(c).as_list() == [0, 0, 0, 0]


def test_adjoint_coefficients_square_to_zero():
    g = preset("gl2")
    c = build_ce(g, ModuleSpec.adjoint(g, (1, 2)), max_weight=4, degree_window=(0, 4))
    assert c.square_report()["d_squared"]


@pytest.mark.parametrize("name", ["sl2", "gl2", "abelian:2", "sl3"])
def test_hodge_family_cohomology_trivial(name):
    L = hodge_family(preset(name), 1)
    res = ce_cohomology(build_ce(L, max_weight=4, degree_window=(0, 3)))
    assert res.dims[0] == 1
    assert all(v == 0 for k, v in res.dims.items() if k != 0)


def test_truncation_flags():
    # positive epsilon puts some cochain generators in degree 0, so every degree is capped
    L = epsilon_extend(preset("sl2"), 1)
    res = ce_cohomology(build_ce(L, max_weight=3, degree_window=(0, 2)))
    assert set(res.flags.values()) == {"truncated"}
    # negative epsilon keeps all generators in positive degree: low degrees stay exact
    L = epsilon_extend(preset("sl2"), -1)
    res = ce_cohomology(build_ce(L, max_weight=3, degree_window=(0, 2)))
    assert set(res.flags.values()) == {"exact"}


def test_graded_algebra_from_cdga():
    L = tensor_with_cdga(cohomology_cdga("S3"), preset("sl2"))
    c = build_ce(L, max_weight=3, degree_window=(-1, 3))
    assert c.square_report()["d_squared"]


def test_augmentation_filtration_levels_match_weight():
    c = build_ce(preset("sl2"))
    f = augmentation_filtration(c)
    assert tuple(f.levels[2]) == (2, 2, 2)


def test_empty_window_rejected():
    with pytest.raises(ValueError):
        build_ce(preset("sl2"), degree_window=(3, 1))


def test_wrong_module_size_rejected():
    g = preset("sl2")
    bad = ModuleSpec("bad", (0,), tuple(), None, (1,))
    with pytest.raises(ValueError):
        build_ce(g, bad)


def test_broken_module_detected():
    g = preset("sl2")
    good = ModuleSpec.adjoint(g, (1,))
    # a module whose action is scaled by 2 is not a representation
    bad = ModuleSpec("bad", good.degrees, tuple(a.scale(2) for a in good.action), None, (1,))
    with pytest.raises(ComplexError):
        build_ce(g, bad)
