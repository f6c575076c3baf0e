"""Weyl algebras with PBW normal ordering and differential-operator-type skeletons.

Generators are ``x_0..x_{n-1}`` and ``∂_0..∂_{n-1}`` with ``|∂_i| = -|x_i|`` and
graded commutators ``[∂_i, x_j] = δ_ij``.  A basis monomial is a sorted tuple of
generator indices (x's are ``0..n-1``, ∂'s are ``n..2n-1``), so sorting puts
every ∂ to the right.  The PBW filtration level of a monomial is its length.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Mapping, Sequence

from .exactlinalg import RationalMatrix, rank
from .graded_core import free_cga_table, sort_with_sign

__all__ = ["CapOverflow", "WeylAlgebra", "DOTAlgebra", "DotReport", "dot_check",
           "heisenberg_enveloping_dims", "polynomial_action", "oracle_product_check", "oracle_sweep", "NORMAL_ORDER"]

NORMAL_ORDER = "derivatives-right"

Element = dict  # monomial tuple -> Fraction


class CapOverflow(ArithmeticError):
    """A product has terms above the filtration cap."""


def _sign(k: int) -> int:
    return -1 if k & 1 else 1


def _add(acc: dict, key, c) -> None:
    v = acc.get(key, 0) + c
    if v:
        acc[key] = v
    else:
        acc.pop(key, None)


class WeylAlgebra:
    """Weyl algebra on ``V ⊕ V*`` with ``V`` spanned by x's of the given degrees."""

    def __init__(self, x_degrees: Sequence[int], cap: int, x_labels: Sequence[str] | None = None):
        self.n = len(x_degrees)
        self.cap = cap
        self.x_degrees = tuple(int(d) for d in x_degrees)
        self.degrees = self.x_degrees + tuple(-d for d in self.x_degrees)
        labels = list(x_labels) if x_labels else [f"x{i}" for i in range(self.n)]
        self.labels = tuple(labels) + tuple(f"∂{l}" if not l.startswith("x") else "∂" + l[1:] for l in labels)
        self._rmul = lru_cache(maxsize=None)(self._right_mul_gen_uncached)

    # -- monomials ------------------------------------------------------
    def is_x(self, g: int) -> bool:
        return g < self.n

    def partner(self, g: int) -> int:
        return g + self.n if g < self.n else g - self.n

    def degree(self, mono: tuple) -> int:
        return sum(self.degrees[g] for g in mono)

    def level(self, mono: tuple) -> int:
        return len(mono)

    def split(self, mono: tuple) -> tuple[tuple, tuple]:
        k = next((i for i, g in enumerate(mono) if g >= self.n), len(mono))
        return mono[:k], mono[k:]

    def canonical(self, word: Sequence[int]) -> tuple[int, tuple] | None:
        """Graded-commutative sort (the PBW symbol); None when an odd generator repeats."""
        mono, s = sort_with_sign(tuple(word), [self.degrees[g] for g in word])
        for a, b in zip(mono, mono[1:]):
            if a == b and self.degrees[a] & 1:
                return None
        return s, mono

    def basis(self, max_level: int | None = None) -> list[tuple]:
        """PBW monomials of length ≤ max_level (default the cap)."""
        L = self.cap if max_level is None else max_level
        out = []

        def rec(start, cur):
            out.append(tuple(cur))
            if len(cur) == L:
                return
            for g in range(start, 2 * self.n):
                if cur and cur[-1] == g and self.degrees[g] & 1:
                    continue
                cur.append(g)
                rec(g, cur)
                cur.pop()

        rec(0, [])
        return out

    def dims(self, max_level: int | None = None) -> dict[tuple[int, int, int], int]:
        """Counts keyed by (x-weight m, ∂-weight n, degree)."""
        out: dict[tuple[int, int, int], int] = {}
        for mono in self.basis(max_level):
            xs, ds = self.split(mono)
            key = (len(xs), len(ds), self.degree(mono))
            out[key] = out.get(key, 0) + 1
        return out

    # -- product --------------------------------------------------------
    def _insert_sorted(self, mono: tuple, g: int) -> tuple[int, tuple] | None:
        """mono · g where g only needs to move left past larger generators (no contractions)."""
        pos = len(mono)
        while pos > 0 and mono[pos - 1] > g:
            pos -= 1
        if pos > 0 and mono[pos - 1] == g and self.degrees[g] & 1:
            return None
        passed = sum(self.degrees[h] for h in mono[pos:])
        return _sign(passed * self.degrees[g]), mono[:pos] + (g,) + mono[pos:]

    def _right_mul_gen_uncached(self, mono: tuple, g: int) -> tuple[tuple[tuple, int], ...]:
        # structure constants of the Weyl algebra are integers
        out: dict[tuple, int] = {}
        if not self.is_x(g):
            r = self._insert_sorted(mono, g)
            if r is not None:
                out[r[1]] = r[0]
            return tuple(out.items())
        xs, ds = self.split(mono)
        if not ds:
            r = self._insert_sorted(mono, g)
            if r is not None:
                out[r[1]] = r[0]
            return tuple(out.items())
        last = ds[-1]
        rest = mono[:-1]
        # ∂_last x_g = s x_g ∂_last + δ
        s = _sign(self.degrees[last] * self.degrees[g])
        for m, c in self._rmul(rest, g):
            for m2, c2 in self._rmul(m, last):
                _add(out, m2, s * c * c2)
        if self.partner(last) == g:
            _add(out, rest, 1)
        return tuple(out.items())

    def mul_monomials(self, a: tuple, b: tuple, enforce_cap: bool = True) -> dict[tuple, int]:
        cur: dict[tuple, int] = {a: 1}
        for g in b:
            nxt: dict[tuple, int] = {}
            for m, c in cur.items():
                for m2, c2 in self._rmul(m, g):
                    _add(nxt, m2, c * c2)
            cur = nxt
        if enforce_cap:
            over = [m for m in cur if len(m) > self.cap]
            if over:
                raise CapOverflow(f"product has level {max(map(len, over))} > cap {self.cap}")
        return cur

    def product(self, a: Mapping[tuple, object], b: Mapping[tuple, object]) -> Element:
        """Normal-ordered product of two elements (∂'s to the right)."""
        out: dict[tuple, Fraction] = {}
        for ma, ca in a.items():
            if len(ma) > self.cap:
                raise CapOverflow(f"input monomial {ma} above cap {self.cap}")
            for mb, cb in b.items():
                if len(mb) > self.cap:
                    raise CapOverflow(f"input monomial {mb} above cap {self.cap}")
                for m, c in self.mul_monomials(ma, mb).items():
                    _add(out, m, Fraction(ca) * Fraction(cb) * c)
        return out

    def gen(self, g: int) -> Element:
        return {(g,): Fraction(1)}

    def x(self, i: int) -> Element:
        return self.gen(i)

    def d(self, i: int) -> Element:
        return self.gen(self.n + i)

    def commutator(self, a: Element, b: Element, deg_a: int, deg_b: int) -> Element:
        ab, ba = self.product(a, b), self.product(b, a)
        s = _sign(deg_a * deg_b)
        out = dict(ab)
        for m, c in ba.items():
            _add(out, m, -s * c)
        return out

    def leading_term(self, a: tuple, b: tuple) -> Element:
        """Top-level component of a·b."""
        full = self.mul_monomials(a, b, enforce_cap=False)
        top = len(a) + len(b)
        return {m: c for m, c in full.items() if len(m) == top}

    def serialize(self, e: Mapping[tuple, object]) -> dict:
        return {"normal_order": NORMAL_ORDER,
                "terms": [{"monomial": [self.labels[g] for g in m], "coefficient": str(c)}
                          for m, c in sorted(e.items())]}


# ---------------------------------------------------------------------------
# the action on polynomials (independent oracle)


def _act_generator(W: WeylAlgebra, g: int, mono: tuple) -> list[tuple[tuple, int]]:
    if g < W.n:
        r = W.canonical((g,) + mono)
        return [] if r is None else [(r[1], r[0])]
    i, out, prefix = g - W.n, [], 0
    for t, h in enumerate(mono):
        if h == i:
            out.append((mono[:t] + mono[t + 1:], _sign(W.degrees[g] * prefix)))
        prefix += W.degrees[h]
    return out


def _word_on_monomial(W: WeylAlgebra, word: tuple, mono: tuple) -> dict[tuple, int]:
    cache = W.__dict__.setdefault("_action_cache", {})
    key = (word, mono)
    hit = cache.get(key)
    if hit is not None:
        return hit
    if not word:
        res = {mono: 1}
    else:
        res = {}
        for m, c in _word_on_monomial(W, word[1:], mono).items():
            for m2, c2 in _act_generator(W, word[0], m):
                _add(res, m2, c * c2)
    cache[key] = res
    return res


def polynomial_action(W: WeylAlgebra, word: Sequence[int], poly: Mapping[tuple, object]) -> dict:
    """Act with a word in the generators on a polynomial in the x's.

    x_i multiplies on the left, ∂_i is the graded left derivation with
    ∂_i(x_j) = δ_ij.  Generators act right to left.
    """
    out: dict[tuple, object] = {}
    word = tuple(word)
    for mono, c in poly.items():
        for m, v in _word_on_monomial(W, word, mono).items():
            _add(out, m, c * v)
    return out


def _apply_element(W: WeylAlgebra, e: Mapping[tuple, object], poly: Mapping[tuple, object]) -> dict:
    out: dict[tuple, object] = {}
    for m, c in e.items():
        for p, v in polynomial_action(W, m, poly).items():
            _add(out, p, c * v)
    return out


def _submultisets(ms: Sequence[int]) -> set[tuple]:
    items = sorted(ms)
    out = set()
    for mask in itertools.product((0, 1), repeat=len(items)):
        out.add(tuple(g for g, k in zip(items, mask) if k))
    return out


def oracle_product_check(W: WeylAlgebra, a: tuple, b: tuple) -> bool:
    """Compare a·b with the composite of the two polynomial actions.

    Two operators in normal form agree iff they agree on x^B for every
    ∂-multiset B that can occur (apply the difference to x^B with B minimal),
    so the test set is the sub-multisets of the ∂-parts involved.
    """
    prod = W.mul_monomials(a, b)
    tests = _submultisets(W.split(a)[1] + W.split(b)[1])
    for m in prod:
        tests |= _submultisets(W.split(m)[1])
    for B in tests:
        r = W.canonical(tuple(g - W.n for g in B))
        if r is None:
            continue  # repeated odd variable: x^B = 0, nothing to test
        p = {r[1]: 1}
        if _apply_element(W, prod, p) != polynomial_action(W, a, polynomial_action(W, b, p)):
            return False
    return True


def oracle_sweep(W: WeylAlgebra, cap: int | None = None) -> tuple[int, list[tuple[tuple, tuple]]]:
    """Check every pair of basis monomials whose levels sum to at most the cap."""
    cap = W.cap if cap is None else cap
    by_level: dict[int, list[tuple]] = {}
    for m in W.basis():
        by_level.setdefault(len(m), []).append(m)
    count, bad = 0, []
    for la, As in by_level.items():
        for lb, Bs in by_level.items():
            if la + lb > cap:
                continue
            for a in As:
                for b in Bs:
                    count += 1
                    if not oracle_product_check(W, a, b):
                        bad.append((a, b))
    return count, bad


# ---------------------------------------------------------------------------
# PBW dimension tables


def heisenberg_enveloping_dims(x_degrees: Sequence[int], level_cap: int,
                               omega: Sequence[Sequence[object]] | None = None) -> dict:
    """PBW dims per (level, degree) of the Weyl algebra, compared with the free cga on V ⊕ V*.

    ``omega[i][j]`` is ω(∂_i, x_j); it must be nondegenerate.  The table is
    computed in a Darboux basis, which exists because ω is nondegenerate.
    """
    n = len(x_degrees)
    if omega is not None:
        om = RationalMatrix.from_rows(omega, ncols=n)
        if om.shape != (n, n) or rank(om) != n:
            raise ValueError("ω is degenerate")
        for i, j, _ in om.entries():
            if x_degrees[i] != x_degrees[j]:
                raise ValueError("ω must pair ∂_i and x_j of opposite degree")
    W = WeylAlgebra(x_degrees, level_cap)
    pbw: dict[tuple[int, int], int] = {}
    for (m, k, deg), c in W.dims().items():
        pbw[(m + k, deg)] = pbw.get((m + k, deg), 0) + c
    cga = free_cga_table(list(x_degrees) + [-d for d in x_degrees], level_cap)
    keys = set(pbw) | set(cga)
    return {"table": dict(sorted(pbw.items())), "free_cga": cga,
            "matches": all(pbw.get(k, 0) == cga.get(k, 0) for k in keys)}


@dataclass
class DOTAlgebra:
    """Bi-indexed dims of an algebra of differential operator type.

    ``dims[(m, n, degree)]`` counts PBW monomials with base weight m and fiber
    weight n; ``base_degrees`` / ``fiber_degrees`` are the generator degrees
    of functions on X and of vector fields.
    """

    name: str
    base_degrees: tuple[int, ...]
    fiber_degrees: tuple[int, ...]
    cap: int
    dims: dict[tuple[int, int, int], int]
    weyl: WeylAlgebra | None = None
    first_page: dict | None = None
    notes: list[str] = field(default_factory=list)

    def gr_fib(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for (m, n, deg), c in self.dims.items():
            out[(n, deg)] = out.get((n, deg), 0) + c
        return out

    def gr_antidiag(self) -> dict[tuple[int, int], int]:
        out: dict[tuple[int, int], int] = {}
        for (m, n, deg), c in self.dims.items():
            out[(n - m, deg)] = out.get((n - m, deg), 0) + c
        return out


@dataclass
class DotReport:
    rows: list[dict]

    @property
    def passed(self) -> bool:
        return all(r["ok"] for r in self.rows)

    def failures(self) -> list[dict]:
        return [r for r in self.rows if not r["ok"]]


def _target_tables(D: DOTAlgebra) -> tuple[dict, dict]:
    """O_fp(T*X) by (fiber weight, degree) and D(|X|) by (n - m, degree), within m + n ≤ cap."""
    base = free_cga_table(D.base_degrees, D.cap)
    fiber = free_cga_table(D.fiber_degrees, D.cap)
    fib, anti = {}, {}
    for (m, d1), c1 in base.items():
        for (n, d2), c2 in fiber.items():
            if m + n > D.cap:
                continue
            fib[(n, d1 + d2)] = fib.get((n, d1 + d2), 0) + c1 * c2
            anti[(n - m, d1 + d2)] = anti.get((n - m, d1 + d2), 0) + c1 * c2
    return fib, anti


def dot_check(D: DOTAlgebra) -> DotReport:
    """Compare both associated gradeds with their targets block by block."""
    fib_t, anti_t = _target_tables(D)
    rows = []
    for name, have, want in (("fiberwise", D.gr_fib(), fib_t), ("anti-diagonal", D.gr_antidiag(), anti_t)):
        for key in sorted(set(have) | set(want)):
            a, b = have.get(key, 0), want.get(key, 0)
            rows.append({"filtration": name, "level": key[0], "degree": key[1], "actual": a, "expected": b,
                         "ok": a == b})
    return DotReport(rows)


def dot_from_generators(name: str, base_degrees: Sequence[int], cap: int, with_product: bool = False) -> DOTAlgebra:
    """PBW skeleton on base coordinates of the given degrees and their dual vector fields."""
    W = WeylAlgebra(base_degrees, cap)
    return DOTAlgebra(name, tuple(base_degrees), tuple(-d for d in base_degrees), cap, W.dims(),
                      W if with_product else None)
