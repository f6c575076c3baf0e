from fractions import Fraction

import pytest

from bvtwist.dg_lie import (CDGA_PRESETS, ConstructionError, DgLieAlgebra, TwistPoint, abelian, cdga_preset,
                            centralizer_basis, check_axioms, cohomology_cdga, epsilon_extend, exterior_cdga,
                            hodge_family, jet_cdga, nonunimodular, point_cdga, preset, supertrace_of_power,
                            tensor_with_cdga, vacuum_twisted_algebra)
from bvtwist.exactlinalg import RationalMatrix

LIE_PRESETS = ["sl2", "sl3", "gl2", "gl3", "so4", "abelian:3"]


@pytest.mark.parametrize("name", LIE_PRESETS)
def test_presets_pass_axioms(name):
    rep = check_axioms(preset(name))
    assert rep.passed, rep.failures
    assert "pairing_invariance" in rep.items


def test_preset_dimensions():
    assert [preset(n).dim for n in LIE_PRESETS] == [3, 8, 4, 9, 6, 3]


def test_unknown_preset():
    with pytest.raises(KeyError):
        preset("e8")


def test_sl2_structure_constants():
    g = preset("sl2")
    # basis E12, E21, H1
    e, f, h = ({i: Fraction(1)} for i in range(3))
    assert g.bracket(e, f) == h
    assert g.bracket(h, e) == {0: Fraction(2)}
    assert g.bracket(h, f) == {1: Fraction(-2)}


def test_broken_jacobi_is_detected():
    # [a,b] = c, [b,c] = a, [c,a] = c violates Jacobi
    g = DgLieAlgebra.from_half_table([0, 0, 0], {(0, 1): {2: 1}, (1, 2): {0: 1}, (2, 0): {2: 1}})
    rep = check_axioms(g)
    assert not rep.items["jacobi"]


def test_bad_differential_is_detected():
    d = RationalMatrix.from_rows([[0, 0], [1, 0]])
    g = DgLieAlgebra([0, 1], {}, differential=d)
    assert check_axioms(g).passed
    g2 = DgLieAlgebra([0, 0], {}, differential=d)
    assert not check_axioms(g2).items["grading"]


def test_degenerate_pairing_flagged():
    g = preset("gl2")
    bad = g.replace(pairing=RationalMatrix.zeros(4, 4))
    assert not check_axioms(bad).items["pairing_nondegenerate"]


@pytest.mark.parametrize("name", CDGA_PRESETS)
def test_cdga_presets(name):
    assert cdga_preset(name).check().passed


def test_cohomology_rings_have_top_class():
    for name, top in [("S4", 4), ("T3", 3), ("CP2", 4), ("S2xS2", 4)]:
        A = cohomology_cdga(name)
        assert A.trace_degree == top
        assert max(A.degrees) == top


@pytest.mark.parametrize("name", ["sl2", "gl2", "so4"])
@pytest.mark.parametrize("e", [-1, 1])
def test_epsilon_extend(name, e):
    L = epsilon_extend(preset(name), e)
    rep = check_axioms(L)
    assert rep.passed, rep.failures
    assert L.dim == 2 * preset(name).dim
    assert L.pairing_degree == e


@pytest.mark.parametrize("e", [-1, 1])
def test_epsilon_matches_tensor_with_exterior(e):
    g = preset("sl2")
    direct = epsilon_extend(g, e)
    via = tensor_with_cdga(exterior_cdga(e), g)
    assert direct.bracket_table == via.bracket_table
    assert direct.differential == via.differential
    assert direct.pairing == via.pairing


def test_epsilon_extend_rejects_even():
    with pytest.raises(ValueError):
        epsilon_extend(preset("sl2"), 2)


@pytest.mark.parametrize("name", ["sl2", "gl2", "sl3", "gl3", "so4"])
@pytest.mark.parametrize("A", ["point", "S1", "T2", "S3", "CP2", "jet"])
def test_tensor_with_cdga(name, A):
    L = tensor_with_cdga(cdga_preset(A), preset(name))
    assert check_axioms(L).passed


def test_tensor_dimension_and_degrees():
    L = tensor_with_cdga(cohomology_cdga("S3"), preset("sl2"))
    assert L.degrees == (0, 0, 0, 3, 3, 3)


@pytest.mark.parametrize("t", [0, 1, Fraction(-2, 3)])
@pytest.mark.parametrize("name", ["sl2", "gl2", "abelian:2"])
def test_hodge_family(name, t):
    L = hodge_family(preset(name), t)
    assert check_axioms(L).passed
    n = preset(name).dim
    assert L.degrees[:n] == tuple(d - 1 for d in preset(name).degrees)
    coh = L.cohomology()
    if t:
        assert sum(coh.values()) == 0
    else:
        assert sum(coh.values()) == 2 * n


def test_jet_derivations_are_odd_and_commute():
    A = jet_cdga(2)
    assert set(A.derivations) == {"dz1", "dz2"}
    assert A.check().passed


def test_centralizer_of_regular_element():
    g = preset("gl3")
    # diag(1,2,3); the basis is E11, E12, ..., E33
    x = {0: 1, 4: 2, 8: 3}
    assert len(centralizer_basis(g, x)) == 3


TWISTS = [TwistPoint(0, 0, 0), TwistPoint(1, 1, 0), TwistPoint(1, 0, 1), TwistPoint(0, 2, 1)]


@pytest.mark.parametrize("p", TWISTS)
@pytest.mark.parametrize("A", ["point", "jet"])
def test_vacuum_twist_at_origin(p, A):
    L = vacuum_twisted_algebra(cdga_preset(A), preset("gl2"), {}, p)
    rep = check_axioms(L)
    assert rep.passed, rep.failures
    assert L.mode == ("Z2" if p.u else "Z")


@pytest.mark.parametrize("p", TWISTS[:2])
def test_vacuum_twist_nonzero_x_no_u(p):
    # gl2 basis E11, E12, E21, E22; x = diag(1, 2)
    L = vacuum_twisted_algebra(jet_cdga(2), preset("gl2"), {0: 1, 3: 2}, p)
    assert check_axioms(L).passed
    assert L.mode == "Z2"


def test_vacuum_twist_with_x_and_u_breaks_leibniz():
    L = vacuum_twisted_algebra(point_cdga(), preset("gl2"), {0: 1, 3: 2}, TwistPoint(0, 0, 1))
    rep = check_axioms(L)
    assert rep.items["d_squared"]
    assert not rep.items["leibniz"]


def test_vacuum_twist_nilpotent_u_refused():
    with pytest.raises(ConstructionError):
        vacuum_twisted_algebra(point_cdga(), preset("gl2"), {1: 1}, TwistPoint(0, 0, 1))


def test_vacuum_twist_needs_ordinary_lie_algebra():
    with pytest.raises(ValueError):
        vacuum_twisted_algebra(point_cdga(), epsilon_extend(preset("sl2")), {}, TwistPoint(0, 0, 0))


def test_subalgebra_restricts_pairing():
    g = preset("gl2")
    h = g.subalgebra([{0: 1}, {3: 1}], name="t")
    assert h.is_abelian()
    assert h.pairing is not None
    assert check_axioms(h).passed


def test_supertrace_of_power_traceless_on_sl2():
    g = preset("sl2")
    assert supertrace_of_power(g, {2: 1}, 1) == 0
    assert supertrace_of_power(g, {2: 1}, 2) == 8


def test_nonunimodular_has_no_pairing():
    g = nonunimodular()
    assert g.pairing is None
    assert check_axioms(g).passed
    assert abelian(2).is_abelian()
