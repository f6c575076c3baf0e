import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from bvtwist.weyl_dot import (CapOverflow, WeylAlgebra, dot_check, dot_from_generators, heisenberg_enveloping_dims,
                              oracle_product_check, oracle_sweep, polynomial_action)


def test_canonical_commutator():
    W = WeylAlgebra([0], 4)
    x, d = W.x(0), W.d(0)
    assert W.commutator(d, x, 0, 0) == {(): Fraction(1)}
    assert W.product(x, x) == {(0, 0): Fraction(1)}


def test_d_squared_times_x():
    W = WeylAlgebra([0], 4)
    dd = W.product(W.d(0), W.d(0))
    assert W.product(dd, W.x(0)) == {(0, 1, 1): Fraction(1), (1,): Fraction(2)}


def test_odd_generators_anticommute():
    W = WeylAlgebra([1], 4)
    x, d = W.x(0), W.d(0)
    assert W.product(x, x) == {}
    # for odd pairs the graded commutator [∂, x] = ∂x + x∂ is still 1
    assert W.commutator(d, x, -1, 1) == {(): Fraction(1)}


def test_action_on_polynomials():
    W = WeylAlgebra([0, 0], 4)
    # ∂_0 (x0^2 x1) = 2 x0 x1
    assert polynomial_action(W, (2,), {(0, 0, 1): 1}) == {(0, 1): 2}


@pytest.mark.parametrize("degs", [[0], [1], [0, 1], [1, -1, 2], [0, 0, 1]])
def test_oracle_sweep(degs):
    count, bad = oracle_sweep(WeylAlgebra(degs, 4))
    assert count > 0 and bad == []


def test_oracle_detects_a_wrong_product():
    W = WeylAlgebra([0], 3)
    orig = W.mul_monomials

    def broken(a, b, enforce_cap=True):
        out = dict(orig(a, b, enforce_cap))
        if a == (1,) and b == (0,):
            out[()] = out.get((), 0) + 1
        return out

    W.mul_monomials = broken
    assert not oracle_product_check(W, (1,), (0,))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=1, max_size=3), st.data())
def test_associativity_within_cap(degs, data):
    W = WeylAlgebra(degs, 6)
    basis = W.basis(2)
    a, b, c = (data.draw(st.sampled_from(basis)) for _ in range(3))
    A, B, C = ({a: 1}, {b: 1}, {c: 1})
    assert W.product(W.product(A, B), C) == W.product(A, W.product(B, C))


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(-2, 2), min_size=1, max_size=3), st.data())
def test_leading_term_is_graded_commutative_product(degs, data):
    W = WeylAlgebra(degs, 6)
    basis = W.basis(3)
    a, b = data.draw(st.sampled_from(basis)), data.draw(st.sampled_from(basis))
    canon = W.canonical(a + b)
    want = {} if canon is None else {canon[1]: Fraction(canon[0])}
    assert {m: Fraction(c) for m, c in W.leading_term(a, b).items()} == want


def test_cap_overflow():
    W = WeylAlgebra([0], 2)
    with pytest.raises(CapOverflow):
        W.product({(0, 0): 1}, {(0,): 1})
    with pytest.raises(CapOverflow):
        W.product({(0, 0, 0): 1}, {(): 1})


def brute_pbw(degs, cap):
    n = len(degs)
    all_degs = list(degs) + [-d for d in degs]
    out = {}
    for level in range(cap + 1):
        for combo in itertools.combinations_with_replacement(range(2 * n), level):
            if any(combo.count(g) > 1 and all_degs[g] % 2 for g in set(combo)):
                continue
            key = (level, sum(all_degs[g] for g in combo))
            out[key] = out.get(key, 0) + 1
    return out


@pytest.mark.parametrize("degs", [[0], [1], [0, 1], [2, -1]])
def test_heisenberg_dims(degs):
    res = heisenberg_enveloping_dims(degs, 4)
    assert res["matches"]
    assert res["table"] == brute_pbw(degs, 4)


def test_heisenberg_even_and_odd_counts():
    even = heisenberg_enveloping_dims([0], 4)["table"]
    for k in range(5):
        assert even[(k, 0)] == k + 1
    odd = heisenberg_enveloping_dims([1], 4)["table"]
    assert sum(odd.values()) == 4


def test_heisenberg_rejects_degenerate_omega():
    with pytest.raises(ValueError):
        heisenberg_enveloping_dims([0, 0], 3, omega=[[1, 1], [1, 1]])
    assert heisenberg_enveloping_dims([0, 0], 3, omega=[[0, 1], [1, 0]])["matches"]


@pytest.mark.parametrize("degs", [[0], [1, 0], [0, -1, -2], [1, 0, 0, 0, -1, -1, -1, -2]])
def test_dot_check_passes(degs):
    assert dot_check(dot_from_generators("X", degs, 4)).passed


def test_dot_check_flags_corrupted_block():
    D = dot_from_generators("X", [0, -1], 4)
    key = sorted(D.dims)[3]
    D.dims[key] += 1
    fails = dot_check(D).failures()
    m, n, deg = key
    assert {(f["filtration"], f["level"], f["degree"]) for f in fails} == {
        ("fiberwise", n, deg), ("anti-diagonal", n - m, deg)}
