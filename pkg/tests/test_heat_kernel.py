import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from bvtwist.heat_kernel import (TEST_FUNCTIONS, QuadratureError, QuadratureSpec, boundary_term, by_parts_vanishing,
                                 cauchy_kernel, gauge_condition_check, propagator_eval, radial_integral,
                                 radial_integral_closed)

coord = st.floats(-2, 2, allow_nan=False)
point = st.builds(complex, coord, coord)


def test_cauchy_limit_d1():
    z, w = 0.3 + 0.4j, -0.1 + 0.2j
    P = propagator_eval(1, math.inf, [z], [w])
    assert abs(P[()] - cauchy_kernel(z, w)) < 1e-14


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("r2", [0.01, 1.0, 7.5])
@pytest.mark.parametrize("Lambda", [0.5, 10.0, math.inf])
def test_quadrature_matches_closed_form(d, r2, Lambda):
    val, _ = radial_integral(d, r2, Lambda)
    assert val == pytest.approx(radial_integral_closed(d, r2, Lambda), rel=1e-10)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_small_separation_stays_accurate(d):
    for r2 in (1e-8, 1e-5, 1e-2):
        val, _ = radial_integral(d, r2, 1.0)
        assert val == pytest.approx(radial_integral_closed(d, r2, 1.0), rel=1e-10)


def test_finite_cutoff_deficit_is_exponential():
    r2 = 1.0
    Lam = 1e4 * r2
    ratio = radial_integral(1, r2, Lam)[0] / radial_integral(1, r2, math.inf)[0]
    assert 1 - ratio == pytest.approx(-math.expm1(-r2 / (4 * Lam)), rel=1e-6)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 3), st.lists(point, min_size=6, max_size=6), point)
def test_translation_invariance(d, pts, shift):
    z, w = pts[:d], pts[3:3 + d]
    if sum(abs(a - b) ** 2 for a, b in zip(z, w)) < 1e-3:
        return
    P = propagator_eval(d, 2.0, z, w)
    Q = propagator_eval(d, 2.0, [a + shift for a in z], [b + shift for b in w])
    scale = max(abs(c) for c in P.coefficients.values())
    assert P.max_abs_diff(Q) <= 1e-9 * scale


@pytest.mark.parametrize("d", [1, 2, 3])
@pytest.mark.parametrize("lam", [2.0, 1 / 3])
def test_homogeneity(d, lam):
    rng = np.random.default_rng(d)
    z = list(rng.normal(size=d) + 1j * rng.normal(size=d))
    w = list(rng.normal(size=d) + 1j * rng.normal(size=d))
    for Lam in (1.0, math.inf):
        P = propagator_eval(d, Lam, z, w)
        Q = propagator_eval(d, Lam * lam ** 2, [lam * a for a in z], [lam * b for b in w])
        for word, c in P.coefficients.items():
            assert Q[word] == pytest.approx(lam ** (1 - 2 * d) * c, rel=1e-9)


@pytest.mark.parametrize("d", [1, 2])
def test_monotone_in_cutoff(d):
    z, w = [0.5] * d, [0.0] * d
    mags = [abs(propagator_eval(d, L, z, w)[tuple(range(1, d))]) for L in (0.1, 1.0, 10.0, math.inf)]
    assert mags == sorted(mags)


def test_coincident_points_and_bad_input():
    P = propagator_eval(2, 1.0, [1, 2], [1, 2])
    assert all(c == 0 for c in P.coefficients.values())
    with pytest.raises(ValueError):
        propagator_eval(2, 1.0, [1], [1, 2])
    with pytest.raises(ValueError):
        propagator_eval(1, 0.0, [1], [0])
    with pytest.raises(ValueError):
        radial_integral(1, 0.0, 1.0)


def test_quadrature_failure_is_raised():
    # a tiny subdivision limit cannot resolve a sharply peaked integrand
    with pytest.raises(QuadratureError):
        radial_integral(3, 1e-6, math.inf, QuadratureSpec(limit=1, tolerance=1e-14))


DECAYING = [n for n, t in TEST_FUNCTIONS.items() if t.decaying]


@pytest.mark.parametrize("f,g", list(itertools.product(DECAYING, DECAYING)))
def test_by_parts_vanishes(f, g):
    assert by_parts_vanishing(f, g)["residual"] < 1e-8


def test_by_parts_pieces_against_closed_forms():
    first = by_parts_vanishing("w_gauss", "shifted_gauss")["first"]
    assert first == pytest.approx(-math.pi * math.exp(-0.5) / 8, abs=1e-12)
    # -∫ |w|^2 e^{-2|w|^2} dA = -π/4
    assert by_parts_vanishing("gauss", "wbar_gauss")["first"] == pytest.approx(-math.pi / 4, abs=1e-12)


def test_negative_control_matches_boundary_term():
    res = by_parts_vanishing("one", "wbar", half_width=1.5)
    assert not res["decaying"]
    assert res["value"] == pytest.approx(9.0, abs=1e-9)
    assert boundary_term("one", "wbar", 1.5) == pytest.approx(res["value"], abs=1e-9)


def test_grid_refinement_is_second_order():
    ref = boundary_term("shifted_gauss", "wbar", 1.0, points=20001)
    errs = [abs(by_parts_vanishing("shifted_gauss", "wbar", QuadratureSpec(grid=n), half_width=1.0)["value"] - ref)
            for n in (51, 101, 201)]
    for a, b in zip(errs, errs[1:]):
        assert a / b == pytest.approx(4.0, rel=1e-3)


@pytest.mark.parametrize("d", [1, 2, 3])
def test_gauge_condition(d):
    rep = gauge_condition_check(d, samples=4)
    assert rep["symbolic_zero"]
    assert rep["passed"]


def test_quadrature_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(tolerance=0)
