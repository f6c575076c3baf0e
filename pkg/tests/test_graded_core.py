import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bvtwist.exactlinalg import RationalMatrix
from bvtwist.graded_core import (AffineVectorField, Form, FormWord, GradedMap, GradedVectorSpace,
                                 PolyFormComplex, cartan_identity_check, free_cga_dimension, free_cga_table,
                                 koszul_sign, sort_with_sign, supertrace, wedge_product, wedge_vanishing_check)


def brute_sign(perm, degrees):
    """Sign from applying adjacent transpositions (bubble sort)."""
    cur = list(perm)
    sign = 1
    changed = True
    while changed:
        changed = False
        for i in range(len(cur) - 1):
            if cur[i] > cur[i + 1]:
                if degrees[cur[i]] % 2 and degrees[cur[i + 1]] % 2:
                    sign = -sign
                cur[i], cur[i + 1] = cur[i + 1], cur[i]
                changed = True
    return sign


@settings(max_examples=200, deadline=None)
@given(st.permutations(range(6)), st.lists(st.integers(-3, 3), min_size=6, max_size=6))
def test_koszul_sign_matches_bubble_sort(perm, degrees):
    assert koszul_sign(perm, degrees) == brute_sign(perm, degrees)


def test_koszul_rejects_bad_input():
    with pytest.raises(ValueError):
        koszul_sign([0, 0], [1, 1])
    with pytest.raises(ValueError):
        koszul_sign([0, 1], [1])


def test_sort_with_sign_two_odd():
    assert sort_with_sign((2, 1), [1, 1]) == ((1, 2), -1)
    assert sort_with_sign((2, 1), [1, 2]) == ((1, 2), 1)


def brute_free_cga(degrees, max_weight):
    out = {}
    for w in range(max_weight + 1):
        for combo in itertools.combinations_with_replacement(range(len(degrees)), w):
            if any(combo.count(g) > 1 and degrees[g] % 2 for g in set(combo)):
                continue
            key = (w, sum(degrees[g] for g in combo))
            out[key] = out.get(key, 0) + 1
    return dict(sorted(out.items()))


@settings(max_examples=80, deadline=None)
@given(st.lists(st.integers(-3, 3), min_size=0, max_size=5), st.integers(0, 4))
def test_free_cga_table_matches_enumeration(degrees, w):
    assert free_cga_table(degrees, w) == brute_free_cga(degrees, w)


def test_free_cga_small_cases():
    # one even generator: one monomial per weight
    assert free_cga_table([2], 3) == {(0, 0): 1, (1, 2): 1, (2, 4): 1, (3, 6): 1}
    # one odd generator: exterior algebra
    assert free_cga_table([1], 3) == {(0, 0): 1, (1, 1): 1}
    assert free_cga_dimension([1, 1, 1], 2, 2) == 3


def test_graded_space_operations():
    V = GradedVectorSpace((0, 1, 1, 2))
    assert V.dims() == {0: 1, 1: 2, 2: 1}
    assert V.euler_characteristic() == 0
    assert V.shift(1).degrees == (-1, 0, 0, 1)
    assert V.dual().degrees == (0, -1, -1, -2)
    assert V.collapse().degrees == (0, 1, 1, 0)
    assert V.tensor(GradedVectorSpace((1,))).degrees == (1, 2, 2, 3)
    assert GradedVectorSpace.from_dims({0: 2, 3: 1}).degrees == (0, 0, 3)


def test_supertrace_signs():
    V = GradedVectorSpace((0, 1, 1))
    f = GradedMap(V, V, 0, RationalMatrix.from_rows([[2, 0, 0], [0, 3, 0], [0, 0, 5]]))
    assert supertrace(f) == 2 - 3 - 5


def test_supertrace_needs_degree_zero():
    V = GradedVectorSpace((0, 1))
    with pytest.raises(ValueError):
        supertrace(GradedMap(V, V, 1, RationalMatrix.from_rows([[0, 0], [1, 0]])))


def test_wedge_antisymmetry():
    a, b = FormWord(("a",)), FormWord(("b",))
    assert (a * b).coefficient == -(b * a).coefficient
    assert (a * a).coefficient == 0


def test_wedge_of_one_forms():
    x = Form.one_form({"a": 1, "b": 2})
    y = Form.one_form({"a": 3, "b": 4})
    # (a + 2b)(3a + 4b) = 4ab + 6ba = -2ab
    assert wedge_product([x, y]).terms == {("a", "b"): Fraction(-2)}


@pytest.mark.parametrize("r", range(1, 9))
def test_wedge_vanishing_beyond_rank(r):
    gens = [f"e{i}" for i in range(r)]
    factors = [Form.one_form({g: (i + j) % 3 + 1 for j, g in enumerate(gens)}) for i in range(r + 1)]
    assert wedge_vanishing_check(factors, r, span=gens)
    assert wedge_product(factors).is_zero()


def test_wedge_not_forced_at_rank():
    gens = ["e0", "e1"]
    factors = [FormWord(("e0",)), FormWord(("e1",))]
    assert not wedge_vanishing_check(factors, 2, span=gens)


def test_wedge_rejects_outside_span():
    with pytest.raises(ValueError):
        wedge_vanishing_check([FormWord(("z",))], 1, span=["e0"])


@pytest.mark.parametrize("field", [AffineVectorField.translation(2, 0), AffineVectorField.rotation(2, 0, 1),
                                   AffineVectorField.from_coefficients(2, [{(1, 0): 2, (0, 0): 1},
                                                                           {(0, 1): -1}])])
def test_cartan_identity(field):
    rep = cartan_identity_check(PolyFormComplex(2, truncation=3), field)
    assert rep.passed
    assert rep.columns_checked > 0


def test_quadratic_field_rejected():
    with pytest.raises(ValueError):
        AffineVectorField.from_coefficients(1, [{(2,): 1}])
