"""Graded linear algebra with Koszul signs.

Covers graded vector spaces (Z or Z/2 graded), degree-homogeneous maps,
supertraces, dimension counts for free graded-commutative algebras, products
of odd generators ("form words"), and a truncated polynomial de Rham complex
on R^n used to check Cartan's formula exactly.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from .exactlinalg import RationalMatrix

__all__ = [
    "GradedVectorSpace",
    "GradedMap",
    "koszul_sign",
    "sort_with_sign",
    "free_cga_table",
    "free_cga_dimension",
    "supertrace",
    "FormWord",
    "Form",
    "wedge_product",
    "wedge_vanishing_check",
    "AffineVectorField",
    "PolyFormComplex",
    "CartanReport",
    "cartan_identity_check",
]


def _parity(k: int) -> int:
    return k & 1


@dataclass(frozen=True)
class GradedVectorSpace:
    """Finite-dimensional graded vector space described by its basis degrees.

    The basis is ordered as given; ``degrees[i]`` is the degree of basis
    vector ``i``.  In ``"Z2"`` mode degrees are reduced mod 2.
    """

    degrees: tuple[int, ...]
    mode: str = "Z"
    labels: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.mode not in ("Z", "Z2"):
            raise ValueError(f"unknown grading mode {self.mode!r}")
        degs = tuple(int(d) for d in self.degrees)
        if self.mode == "Z2":
            degs = tuple(d % 2 for d in degs)
        object.__setattr__(self, "degrees", degs)
        if self.labels is not None:
            if len(self.labels) != len(degs):
                raise ValueError("one label per basis vector")
            object.__setattr__(self, "labels", tuple(self.labels))

    @classmethod
    def from_dims(cls, dims: Mapping[int, int], mode: str = "Z") -> "GradedVectorSpace":
        degs = []
        for d in sorted(dims):
            if dims[d] < 0:
                raise ValueError("negative dimension")
            degs.extend([d] * dims[d])
        return cls(tuple(degs), mode)

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def dims(self) -> dict[int, int]:
        out: dict[int, int] = {}
        for d in self.degrees:
            out[d] = out.get(d, 0) + 1
        return dict(sorted(out.items()))

    def indices(self, degree: int) -> list[int]:
        if self.mode == "Z2":
            degree %= 2
        return [i for i, d in enumerate(self.degrees) if d == degree]

    def euler_characteristic(self) -> int:
        return sum(-1 if d & 1 else 1 for d in self.degrees)

    def collapse(self) -> "GradedVectorSpace":
        """Forget the Z-grading down to its parity."""
        return GradedVectorSpace(self.degrees, "Z2", self.labels)

    def shift(self, k: int) -> "GradedVectorSpace":
        """V[k]: the degree-d part of V sits in degree d - k."""
        return GradedVectorSpace(tuple(d - k for d in self.degrees), self.mode, self.labels)

    def dual(self) -> "GradedVectorSpace":
        labels = tuple(f"{l}*" for l in self.labels) if self.labels else None
        return GradedVectorSpace(tuple(-d for d in self.degrees), self.mode, labels)

    def direct_sum(self, other: "GradedVectorSpace") -> "GradedVectorSpace":
        mode = "Z2" if "Z2" in (self.mode, other.mode) else "Z"
        labels = None
        if self.labels and other.labels:
            labels = self.labels + other.labels
        return GradedVectorSpace(self.degrees + other.degrees, mode, labels)

    def tensor(self, other: "GradedVectorSpace") -> "GradedVectorSpace":
        mode = "Z2" if "Z2" in (self.mode, other.mode) else "Z"
        degs = tuple(a + b for a in self.degrees for b in other.degrees)
        labels = None
        if self.labels and other.labels:
            labels = tuple(f"{a}⊗{b}" for a in self.labels for b in other.labels)
        return GradedVectorSpace(degs, mode, labels)


class GradedMap:
    """A homogeneous linear map between graded spaces, stored as one matrix.

    Entries may only connect source degree ``k`` to target degree
    ``k + shift`` (compared mod 2 in Z/2 mode).
    """

    def __init__(self, source: GradedVectorSpace, target: GradedVectorSpace, shift: int,
                 matrix: RationalMatrix):
        if matrix.shape != (target.dim, source.dim):
            raise ValueError(f"matrix shape {matrix.shape} does not match {(target.dim, source.dim)}")
        z2 = "Z2" in (source.mode, target.mode)
        for i, j, _ in matrix.entries():
            want = source.degrees[j] + shift
            got = target.degrees[i]
            if (want - got) % 2 if z2 else want != got:
                raise ValueError(f"entry ({i},{j}) breaks the degree-{shift} condition")
        self.source = source
        self.target = target
        self.shift = shift
        self.matrix = matrix

    def block(self, degree: int) -> RationalMatrix:
        rows = self.target.indices(degree + self.shift)
        cols = self.source.indices(degree)
        return self.matrix.submatrix(rows, cols)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self ∘ other."""
        return GradedMap(other.source, self.target, self.shift + other.shift, self.matrix @ other.matrix)


def sort_with_sign(items: Sequence, degrees: Sequence[int]) -> tuple[tuple, int]:
    """Stable sort of ``items`` returning (sorted items, Koszul sign)."""
    order = sorted(range(len(items)), key=lambda i: items[i])
    return tuple(items[i] for i in order), koszul_sign(order, degrees)


def koszul_sign(permutation: Sequence[int], degrees: Sequence[int]) -> int:
    """Sign of reordering graded elements.

    ``degrees[i]`` is the degree of the element in position ``i``; the new
    sequence is ``[x[permutation[0]], x[permutation[1]], ...]``.  Every pair of
    elements whose relative order flips contributes ``(-1)^(|a||b|)``.
    """
    if len(permutation) != len(degrees):
        raise ValueError("permutation and degree list differ in length")
    if sorted(permutation) != list(range(len(permutation))):
        raise ValueError(f"{permutation!r} is not a permutation")
    odd = [degrees[p] & 1 for p in permutation]
    sign = 1
    # count inversions among odd elements only
    n = len(permutation)
    for a in range(n):
        if not odd[a]:
            continue
        pa = permutation[a]
        for b in range(a + 1, n):
            if odd[b] and permutation[b] < pa:
                sign = -sign
    return sign


def free_cga_table(generator_degrees: Iterable[int], max_weight: int,
                   degree_range: tuple[int, int] | None = None) -> dict[tuple[int, int], int]:
    """Dimensions of the free graded-commutative algebra, keyed by (weight, degree).

    Polynomial on even generators, exterior on odd ones.  Computed by
    multiplying the factors (1 - t q^d)^(-1) and (1 + t q^d) up to ``max_weight``.
    """
    table: dict[tuple[int, int], int] = {(0, 0): 1}
    for d in generator_degrees:
        new: dict[tuple[int, int], int] = {}
        for (w, deg), c in table.items():
            powers = range(0, 2) if d & 1 else range(0, max_weight - w + 1)
            for k in powers:
                if w + k > max_weight:
                    break
                key = (w + k, deg + k * d)
                new[key] = new.get(key, 0) + c
        table = new
    if degree_range is not None:
        lo, hi = degree_range
        table = {k: v for k, v in table.items() if lo <= k[1] <= hi}
    return dict(sorted(table.items()))


def free_cga_dimension(generators: GradedVectorSpace | Iterable[int], degree: int, weight: int) -> int:
    """Dimension of the weight-``weight``, degree-``degree`` piece of Sym(generators)."""
    degs = generators.degrees if isinstance(generators, GradedVectorSpace) else tuple(generators)
    if weight < 0:
        return 0
    return free_cga_table(degs, weight).get((weight, degree), 0)


def supertrace(f: GradedMap) -> Fraction:
    """Sum over degrees of (-1)^k tr(f on degree k)."""
    if f.shift % 2 if f.source.mode == "Z2" else f.shift != 0:
        raise ValueError("supertrace needs a degree-0 map")
    if f.source != f.target:
        raise ValueError("supertrace needs an endomorphism")
    total = Fraction(0)
    for i, d in enumerate(f.source.degrees):
        v = f.matrix[i, i]
        total += -v if d & 1 else v
    return total


# ---------------------------------------------------------------------------
# products of odd generators


@dataclass(frozen=True)
class FormWord:
    """Coefficient times an ordered product of odd generators."""

    generators: tuple
    coefficient: Fraction = Fraction(1)

    def canonical(self) -> "FormWord":
        """Sorted word with the accumulated sign; zero if a generator repeats."""
        gens = tuple(self.generators)
        if len(set(gens)) != len(gens):
            return FormWord((), Fraction(0))
        srt, sign = sort_with_sign(gens, [1] * len(gens))
        return FormWord(srt, Fraction(self.coefficient) * sign)

    @property
    def is_zero(self) -> bool:
        return self.canonical().coefficient == 0

    def __mul__(self, other: "FormWord") -> "FormWord":
        return FormWord(self.generators + other.generators,
                        Fraction(self.coefficient) * Fraction(other.coefficient)).canonical()


class Form:
    """Finite linear combination of canonical form words."""

    def __init__(self, terms: Mapping[tuple, object] | Iterable[FormWord] = ()):
        self.terms: dict[tuple, Fraction] = {}
        items = terms.items() if isinstance(terms, Mapping) else ((w.generators, w.coefficient) for w in terms)
        for gens, c in items:
            w = FormWord(tuple(gens), Fraction(c)).canonical()
            if w.coefficient:
                self.terms[w.generators] = self.terms.get(w.generators, 0) + w.coefficient
        self.terms = {k: v for k, v in self.terms.items() if v}

    @classmethod
    def one_form(cls, coefficients: Mapping[object, object]) -> "Form":
        return cls({(g,): c for g, c in coefficients.items()})

    def __mul__(self, other: "Form") -> "Form":
        out: dict[tuple, Fraction] = {}
        for a, ca in self.terms.items():
            sa = set(a)
            for b, cb in other.terms.items():
                if sa.intersection(b):
                    continue
                w = FormWord(a + b, ca * cb).canonical()
                out[w.generators] = out.get(w.generators, 0) + w.coefficient
        res = Form()
        res.terms = {k: v for k, v in out.items() if v}
        return res

    def __add__(self, other: "Form") -> "Form":
        res = Form()
        res.terms = dict(self.terms)
        for k, v in other.terms.items():
            res.terms[k] = res.terms.get(k, 0) + v
        res.terms = {k: v for k, v in res.terms.items() if v}
        return res

    def is_zero(self) -> bool:
        return not self.terms

    def degree_set(self) -> set[int]:
        return {len(k) for k in self.terms}

    def __repr__(self) -> str:
        return f"Form({self.terms!r})"


def wedge_product(factors: Sequence[Form | FormWord]) -> Form:
    out = Form({(): 1})
    for f in factors:
        if isinstance(f, FormWord):
            f = Form([f])
        out = out * f
    return out


def wedge_vanishing_check(words: Sequence[Form | FormWord], subspace_rank: int,
                          span: Sequence[object] | None = None) -> bool:
    """True iff the product is forced to vanish by counting odd factors.

    Each factor must be built from generators of a declared span of rank
    ``subspace_rank`` (the ``span`` labels when given).  The product is also
    canonicalised and must come out zero whenever the count exceeds the rank.
    """
    count = 0
    for w in words:
        f = Form([w]) if isinstance(w, FormWord) else w
        degs = f.degree_set()
        if len(degs) > 1:
            raise ValueError("factors must be homogeneous")
        if span is not None:
            for k in f.terms:
                if not set(k) <= set(span):
                    raise ValueError(f"factor uses generators outside the declared span: {k}")
        count += degs.pop() if degs else 0
    if span is not None and len(set(span)) != subspace_rank:
        raise ValueError("span labels do not match the declared rank")
    forced = count > subspace_rank
    product = wedge_product(words)
    if forced and not product.is_zero():
        raise ArithmeticError("canonicalised product is nonzero despite exceeding the span rank")
    return forced


# ---------------------------------------------------------------------------
# truncated polynomial de Rham complex


@dataclass(frozen=True)
class AffineVectorField:
    """X = sum_i (constant[i] + sum_j linear[i][j] x_j) d/dx_i."""

    constant: tuple
    linear: tuple

    @classmethod
    def from_coefficients(cls, n: int, coefficients: Sequence[Mapping[tuple, object]]) -> "AffineVectorField":
        """Build from per-component polynomials {exponent tuple: coeff}.

        Raises ``ValueError`` when a component has degree above one, since such
        fields leave the truncated model.
        """
        if len(coefficients) != n:
            raise ValueError("one coefficient polynomial per coordinate")
        const = [Fraction(0)] * n
        lin = [[Fraction(0)] * n for _ in range(n)]
        for i, poly in enumerate(coefficients):
            for exps, c in poly.items():
                if len(exps) != n:
                    raise ValueError("exponent tuple of wrong length")
                deg = sum(exps)
                if deg == 0:
                    const[i] += Fraction(c)
                elif deg == 1:
                    lin[i][exps.index(1)] += Fraction(c)
                elif Fraction(c):
                    raise ValueError(f"component {i} has degree {deg}; only affine fields preserve the truncation")
        return cls(tuple(const), tuple(tuple(r) for r in lin))

    @classmethod
    def translation(cls, n: int, i: int) -> "AffineVectorField":
        c = [Fraction(0)] * n
        c[i] = Fraction(1)
        return cls(tuple(c), tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n)))

    @classmethod
    def rotation(cls, n: int, i: int, j: int) -> "AffineVectorField":
        """x_i d/dx_j - x_j d/dx_i."""
        lin = [[Fraction(0)] * n for _ in range(n)]
        lin[j][i] = Fraction(1)
        lin[i][j] = Fraction(-1)
        return cls(tuple(Fraction(0) for _ in range(n)), tuple(tuple(r) for r in lin))

    @property
    def n(self) -> int:
        return len(self.constant)

    def component(self, i: int) -> dict[tuple, Fraction]:
        n = self.n
        out = {}
        if self.constant[i]:
            out[(0,) * n] = Fraction(self.constant[i])
        for j, a in enumerate(self.linear[i]):
            if a:
                e = [0] * n
                e[j] = 1
                out[tuple(e)] = Fraction(a)
        return out


def _monomials(n: int, max_deg: int) -> list[tuple[int, ...]]:
    out = []
    for deg in range(max_deg + 1):
        for c in itertools.combinations_with_replacement(range(n), deg):
            e = [0] * n
            for i in c:
                e[i] += 1
            out.append(tuple(e))
    return out


class PolyFormComplex:
    """Differential forms on R^n with polynomial coefficients of degree <= D.

    Basis elements are pairs (exponent tuple, sorted index tuple) standing for
    ``x^a dx_I``.
    """

    def __init__(self, n: int, truncation: int = 4):
        if n < 1 or truncation < 0:
            raise ValueError("need n >= 1 and truncation >= 0")
        self.n = n
        self.truncation = truncation
        self.basis = [(a, I) for k in range(n + 1)
                      for I in itertools.combinations(range(n), k)
                      for a in _monomials(n, truncation)]
        self.index = {b: i for i, b in enumerate(self.basis)}

    @property
    def dim(self) -> int:
        return len(self.basis)

    def form_degree(self, i: int) -> int:
        return len(self.basis[i][1])

    def poly_degree(self, i: int) -> int:
        return sum(self.basis[i][0])

    def interior(self, i: int) -> bool:
        """Strictly inside the truncation window (operators do not overflow)."""
        return self.poly_degree(i) < self.truncation

    def _assemble(self, image) -> RationalMatrix:
        entries: dict[tuple[int, int], Fraction] = {}
        for col, b in enumerate(self.basis):
            for key, c in image(b).items():
                row = self.index.get(key)
                if row is None:
                    continue  # beyond the truncation
                entries[(row, col)] = entries.get((row, col), 0) + c
        return RationalMatrix.from_entries(self.dim, self.dim, entries)

    @staticmethod
    def _wedge_front(j: int, I: tuple) -> tuple[tuple, int] | None:
        if j in I:
            return None
        pos = sum(1 for i in I if i < j)
        return tuple(sorted(I + (j,))), (-1) ** pos

    def _d_image(self, b) -> dict:
        a, I = b
        out: dict = {}
        for j in range(self.n):
            if a[j] == 0:
                continue
            w = self._wedge_front(j, I)
            if w is None:
                continue
            J, s = w
            e = list(a)
            e[j] -= 1
            key = (tuple(e), J)
            out[key] = out.get(key, 0) + s * a[j]
        return out

    def _iota_image(self, X: AffineVectorField, b) -> dict:
        a, I = b
        out: dict = {}
        for r, i in enumerate(I):
            J = I[:r] + I[r + 1:]
            for e, c in X.component(i).items():
                key = (tuple(x + y for x, y in zip(a, e)), J)
                out[key] = out.get(key, 0) + (-1) ** r * c
        return out

    def _lie_image(self, X: AffineVectorField, b) -> dict:
        a, I = b
        out: dict = {}
        # X(f) dx_I
        for j in range(self.n):
            if a[j] == 0:
                continue
            for e, c in X.component(j).items():
                m = list(a)
                m[j] -= 1
                key = (tuple(x + y for x, y in zip(m, e)), I)
                out[key] = out.get(key, 0) + c * a[j]
        # f * sum_r dx_{i1} ... d(X^{i_r}) ... dx_{ik}
        for r, i in enumerate(I):
            for k in range(self.n):
                c = X.linear[i][k]
                if not c:
                    continue
                word = I[:r] + (k,) + I[r + 1:]
                if len(set(word)) != len(word):
                    continue
                J, s = sort_with_sign(word, [1] * len(word))
                key = (a, J)
                out[key] = out.get(key, 0) + s * c
        return out

    def d_matrix(self) -> RationalMatrix:
        return self._assemble(self._d_image)

    def iota_matrix(self, X: AffineVectorField) -> RationalMatrix:
        self._check_field(X)
        return self._assemble(lambda b: self._iota_image(X, b))

    def lie_matrix(self, X: AffineVectorField) -> RationalMatrix:
        """Lie derivative assembled from its defining formula (not from Cartan)."""
        self._check_field(X)
        return self._assemble(lambda b: self._lie_image(X, b))

    def _check_field(self, X: AffineVectorField):
        if not isinstance(X, AffineVectorField):
            raise TypeError("expected an AffineVectorField")
        if X.n != self.n:
            raise ValueError("vector field lives on a different R^n")


@dataclass
class CartanReport:
    max_deviation: Fraction
    iota_square_max: Fraction
    d_square_max: Fraction
    columns_checked: int
    truncation: int
    passed: bool = field(init=False)

    def __post_init__(self):
        self.passed = self.max_deviation == 0 and self.iota_square_max == 0 and self.d_square_max == 0


def cartan_identity_check(model: PolyFormComplex, X: AffineVectorField) -> CartanReport:
    """Compare d ι_X + ι_X d with L_X on every basis form strictly inside the window."""
    d = model.d_matrix()
    iota = model.iota_matrix(X)
    lie = model.lie_matrix(X)
    cartan = d @ iota + iota @ d
    inside = [i for i in range(model.dim) if model.interior(i)]
    # ι_X twice raises the polynomial degree by two
    inside2 = [i for i in inside if model.poly_degree(i) < model.truncation - 1]

    def max_abs(m: RationalMatrix, cols) -> Fraction:
        sub = m.submatrix(range(m.nrows), cols)
        return max((abs(v) for _, _, v in sub.entries()), default=Fraction(0))

    dev = max_abs(cartan - lie, inside)
    return CartanReport(
        max_deviation=dev,
        iota_square_max=max_abs(iota @ iota, inside2),
        d_square_max=max_abs(d @ d, list(range(model.dim))),
        columns_checked=len(inside),
        truncation=model.truncation,
    )
