"""Finite-dimensional dg Lie algebras and the constructions applied to them.

An algebra is a basis with degrees, a differential (matrix acting on column
vectors), a complete table of bracket structure constants and an optional
invariant pairing.  Elements are sparse ``dict`` index -> ``Fraction``.

Sign rules: the bracket on ``A ⊗ L`` is
``[a⊗x, b⊗y] = (-1)^{|x||b|} ab ⊗ [x, y]`` and the differential is
``d(a⊗x) = d_A a ⊗ x + (-1)^{|a|} a ⊗ dx``.  The ε-extension is the special
case ``A = Λ[ε]``.  Every construction is re-validated with :func:`check_axioms`.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exactlinalg import (MatrixComplex, RationalMatrix, cohomology_dims, kernel_basis, rank,
                          rref, solve)
from .graded_core import GradedMap, GradedVectorSpace, supertrace

__all__ = [
    "DgLieAlgebra",
    "CdgAlgebra",
    "TwistPoint",
    "AxiomReport",
    "ConstructionError",
    "check_axioms",
    "preset",
    "PRESETS",
    "epsilon_extend",
    "hodge_family",
    "tensor_with_cdga",
    "vacuum_twisted_algebra",
    "centralizer_basis",
    "exterior_cdga",
    "point_cdga",
    "cohomology_cdga",
    "jet_cdga",
    "CDGA_PRESETS",
    "cdga_preset",
]

Vec = dict  # sparse vector: index -> Fraction


class ConstructionError(ValueError):
    """A construction produced data that fails a structural check (e.g. d^2 != 0)."""


def _vec(v) -> Vec:
    if isinstance(v, Mapping):
        return {int(i): Fraction(c) for i, c in v.items() if c}
    return {i: Fraction(c) for i, c in enumerate(v) if c}


def _axpy(acc: Vec, c, v: Mapping[int, Fraction]) -> None:
    if not c:
        return
    for i, x in v.items():
        w = acc.get(i, 0) + c * x
        if w:
            acc[i] = w
        else:
            acc.pop(i, None)


@dataclass(frozen=True)
class TwistPoint:
    """Point (t1, t2, u) of the three-parameter twist family."""

    t1: Fraction = Fraction(0)
    t2: Fraction = Fraction(0)
    u: Fraction = Fraction(0)

    def __post_init__(self):
        for name in ("t1", "t2", "u"):
            object.__setattr__(self, name, Fraction(getattr(self, name)))

    def as_tuple(self) -> tuple[Fraction, Fraction, Fraction]:
        return (self.t1, self.t2, self.u)


class DgLieAlgebra:
    """A finite-dimensional dg Lie algebra with structure constants.

    ``bracket`` maps ordered basis pairs ``(i, j)`` to sparse vectors; pairs
    that are absent bracket to zero.  The table must be complete (both
    ``(i, j)`` and ``(j, i)``); :meth:`from_half_table` fills it in.
    """

    def __init__(self, degrees: Sequence[int], bracket: Mapping[tuple[int, int], Mapping[int, object]],
                 differential: RationalMatrix | None = None, pairing: RationalMatrix | None = None,
                 pairing_degree: int = 0, mode: str = "Z", labels: Sequence[str] | None = None,
                 name: str = "", defining_rep: Sequence[RationalMatrix] | None = None):
        self.space = GradedVectorSpace(tuple(degrees), mode, tuple(labels) if labels else None)
        n = self.space.dim
        self.bracket_table: dict[tuple[int, int], Vec] = {}
        for (i, j), v in bracket.items():
            if not (0 <= i < n and 0 <= j < n):
                raise IndexError(f"bracket index ({i},{j}) out of range")
            vv = _vec(v)
            if vv:
                self.bracket_table[(i, j)] = vv
        self.differential = differential if differential is not None else RationalMatrix.zeros(n, n)
        if self.differential.shape != (n, n):
            raise ValueError("differential has the wrong shape")
        if pairing is not None and pairing.shape != (n, n):
            raise ValueError("pairing has the wrong shape")
        self.pairing = pairing
        self.pairing_degree = pairing_degree
        self.name = name
        self.defining_rep = tuple(defining_rep) if defining_rep is not None else None
        self._ad_cache: dict[int, RationalMatrix] = {}

    @classmethod
    def from_half_table(cls, degrees, half: Mapping[tuple[int, int], Mapping[int, object]], **kw):
        """Fill ``(j, i)`` entries from ``(i, j)`` by graded antisymmetry."""
        degs = list(degrees)
        full: dict[tuple[int, int], Vec] = {}
        for (i, j), v in half.items():
            vv = _vec(v)
            full[(i, j)] = vv
            if i != j:
                s = -((-1) ** (degs[i] * degs[j]))
                full[(j, i)] = {k: s * c for k, c in vv.items()}
        return cls(degs, full, **kw)

    # -- basic data -----------------------------------------------------
    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def degrees(self) -> tuple[int, ...]:
        return self.space.degrees

    @property
    def mode(self) -> str:
        return self.space.mode

    @property
    def labels(self) -> tuple[str, ...]:
        return self.space.labels or tuple(f"e{i}" for i in range(self.dim))

    def __repr__(self) -> str:
        return f"DgLieAlgebra({self.name or '?'}, dim={self.dim}, mode={self.mode})"

    def element(self, coords) -> Vec:
        return _vec(coords)

    def degree_of(self, v: Mapping[int, Fraction]) -> int | None:
        degs = {self.degrees[i] for i, c in v.items() if c}
        if len(degs) > 1:
            return None
        return degs.pop() if degs else 0

    def even_indices(self) -> list[int]:
        return [i for i, d in enumerate(self.degrees) if not d & 1]

    def bracket(self, u: Mapping[int, object], v: Mapping[int, object]) -> Vec:
        out: Vec = {}
        u, v = _vec(u), _vec(v)
        for i, a in u.items():
            for j, b in v.items():
                w = self.bracket_table.get((i, j))
                if w:
                    _axpy(out, a * b, w)
        return out

    def d(self, v: Mapping[int, object]) -> Vec:
        return self.differential.apply(_vec(v))

    def kappa(self, u: Mapping[int, object], v: Mapping[int, object]) -> Fraction:
        if self.pairing is None:
            raise ValueError(f"{self.name or 'algebra'} carries no pairing")
        u, v = _vec(u), _vec(v)
        tot = Fraction(0)
        for i, a in u.items():
            row = self.pairing.row(i)
            for j, b in v.items():
                c = row.get(j)
                if c:
                    tot += a * b * c
        return tot

    def ad_basis(self, i: int) -> RationalMatrix:
        """Matrix of [e_i, -]."""
        m = self._ad_cache.get(i)
        if m is None:
            cols = [self.bracket_table.get((i, j), {}) for j in range(self.dim)]
            m = RationalMatrix.from_columns(self.dim, cols)
            self._ad_cache[i] = m
        return m

    def right_ad_basis(self, j: int) -> RationalMatrix:
        """Matrix of [-, e_j]."""
        cols = [self.bracket_table.get((i, j), {}) for i in range(self.dim)]
        return RationalMatrix.from_columns(self.dim, cols)

    def ad(self, x: Mapping[int, object]) -> RationalMatrix:
        x = _vec(x)
        cols: list[Vec] = [{} for _ in range(self.dim)]
        for i, a in x.items():
            for j in range(self.dim):
                w = self.bracket_table.get((i, j))
                if w:
                    _axpy(cols[j], a, w)
        return RationalMatrix.from_columns(self.dim, cols)

    def ad_graded(self, x: Mapping[int, object]) -> GradedMap:
        deg = self.degree_of(_vec(x))
        if deg is None:
            raise ValueError("ad of an inhomogeneous element")
        return GradedMap(self.space, self.space, deg, self.ad(x))

    def is_abelian(self) -> bool:
        return not self.bracket_table

    # -- derived data ---------------------------------------------------
    def cochain_complex(self) -> MatrixComplex:
        """(L, ℓ1) as a MatrixComplex (periodic in Z/2 mode)."""
        return _graded_complex(self.degrees, self.differential, self.mode == "Z2")

    def cohomology(self) -> dict[int, int]:
        """dim H^k(L, ℓ1), keyed by degree (or parity 0/1 in Z/2 mode)."""
        return _graded_cohomology(self.degrees, self.differential, self.mode == "Z2")

    def collapse(self) -> "DgLieAlgebra":
        """The same algebra with its grading reduced mod 2."""
        return self.replace(mode="Z2")

    def replace(self, **changes) -> "DgLieAlgebra":
        kw = dict(degrees=self.degrees, bracket=self.bracket_table, differential=self.differential,
                  pairing=self.pairing, pairing_degree=self.pairing_degree, mode=self.mode,
                  labels=self.space.labels, name=self.name, defining_rep=self.defining_rep)
        kw.update(changes)
        return DgLieAlgebra(**kw)

    def with_differential(self, differential: RationalMatrix, mode: str | None = None,
                          name: str | None = None) -> "DgLieAlgebra":
        return self.replace(differential=differential, mode=mode or self.mode,
                            name=self.name if name is None else name)

    def subalgebra(self, basis: Sequence[Mapping[int, object] | Sequence[object]], name: str = "") -> "DgLieAlgebra":
        """Subalgebra spanned by homogeneous vectors closed under bracket and d."""
        vecs = [_vec(b) for b in basis]
        k = len(vecs)
        if k == 0:
            return DgLieAlgebra((), {}, mode=self.mode, name=name)
        degs = []
        for v in vecs:
            dg = self.degree_of(v)
            if dg is None:
                raise ValueError("subalgebra basis must be homogeneous")
            degs.append(dg)
        B = RationalMatrix.from_columns(self.dim, vecs)
        if rank(B) != k:
            raise ValueError("subalgebra basis is linearly dependent")

        def coords(w: Vec) -> Vec:
            x = solve(B, w)
            if x is None:
                raise ValueError("span is not closed under the operations")
            return {i: c for i, c in enumerate(x) if c}

        table = {}
        for a in range(k):
            for b in range(k):
                w = self.bracket(vecs[a], vecs[b])
                if w:
                    table[(a, b)] = coords(w)
        dcols = [coords(self.d(v)) for v in vecs]
        dmat = RationalMatrix.from_columns(k, dcols)
        pair = None
        if self.pairing is not None:
            pair = RationalMatrix.from_rows([[self.kappa(vecs[a], vecs[b]) for b in range(k)] for a in range(k)])
        rep = None
        if self.defining_rep is not None:
            rep = []
            for v in vecs:
                m = RationalMatrix.zeros(*self.defining_rep[0].shape)
                for i, c in v.items():
                    m = m + self.defining_rep[i].scale(c)
                rep.append(m)
        return DgLieAlgebra(degs, table, dmat, pair, self.pairing_degree, self.mode,
                            name=name or f"sub({self.name})", defining_rep=rep)

    def structure_key(self):
        """Hashable summary used for byte-level equality of constructions."""
        return (self.degrees, self.mode, tuple(sorted((k, tuple(sorted(v.items()))) for k, v in self.bracket_table.items())),
                self.differential, self.pairing, self.pairing_degree)


def _graded_complex(degrees: Sequence[int], d: RationalMatrix, periodic: bool) -> MatrixComplex:
    if periodic:
        ev = [i for i, g in enumerate(degrees) if not g & 1]
        od = [i for i, g in enumerate(degrees) if g & 1]
        return MatrixComplex([len(ev), len(od)], [d.submatrix(od, ev), d.submatrix(ev, od)], periodic=True)
    if not degrees:
        return MatrixComplex([0])
    lo, hi = min(degrees), max(degrees)
    idx = {k: [i for i, g in enumerate(degrees) if g == k] for k in range(lo, hi + 1)}
    diffs = [d.submatrix(idx[k + 1], idx[k]) for k in range(lo, hi)]
    for i, j, _ in d.entries():
        if degrees[i] != degrees[j] + 1:
            raise ConstructionError("differential is not of degree +1")
    return MatrixComplex([len(idx[k]) for k in range(lo, hi + 1)], diffs, offset=lo)


def _graded_cohomology(degrees, d, periodic) -> dict[int, int]:
    return cohomology_dims(_graded_complex(degrees, d, periodic))


# ---------------------------------------------------------------------------
# axioms


@dataclass
class AxiomReport:
    """Itemised outcome of :func:`check_axioms`; ``failures`` lists witnesses."""

    items: dict[str, bool] = field(default_factory=dict)
    failures: dict[str, list] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.items.values())

    def _fail(self, key: str, witness) -> None:
        self.items[key] = False
        lst = self.failures.setdefault(key, [])
        if len(lst) < 5:
            lst.append(witness)

    def as_dict(self) -> dict:
        return {"passed": self.passed, "items": dict(self.items),
                "failures": {k: [str(w) for w in v] for k, v in self.failures.items()}}


def _sign(k: int) -> int:
    return -1 if k & 1 else 1


def check_axioms(L: DgLieAlgebra) -> AxiomReport:
    """Exact check of every dg Lie axiom (plus pairing axioms when present)."""
    rep = AxiomReport()
    n = L.dim
    degs = L.degrees
    z2 = L.mode == "Z2"

    def same(a, b):
        return (a - b) % 2 == 0 if z2 else a == b

    for key in ("grading", "d_squared", "antisymmetry", "jacobi", "leibniz"):
        rep.items[key] = True
    # grading
    for (i, j), v in L.bracket_table.items():
        for k in v:
            if not same(degs[k], degs[i] + degs[j]):
                rep._fail("grading", ("bracket", i, j, k))
    for i, j, _ in L.differential.entries():
        if not same(degs[i], degs[j] + 1):
            rep._fail("grading", ("differential", i, j))
    # d^2
    d = L.differential
    if not (d @ d).is_zero():
        rep._fail("d_squared", "d@d != 0")
    # antisymmetry
    for i in range(n):
        for j in range(i, n):
            a = L.bracket_table.get((i, j), {})
            b = L.bracket_table.get((j, i), {})
            s = -_sign(degs[i] * degs[j])
            keys = set(a) | set(b)
            if any(a.get(k, 0) != s * b.get(k, 0) for k in keys):
                rep._fail("antisymmetry", (i, j))
    # Jacobi as ad_[a,b] = ad_a ad_b - (-1)^{|a||b|} ad_b ad_a
    ads = [L.ad_basis(i) for i in range(n)]
    for i in range(n):
        for j in range(i, n):
            lhs = L.ad(L.bracket_table.get((i, j), {}))
            rhs = ads[i] @ ads[j] - (ads[j] @ ads[i]).scale(_sign(degs[i] * degs[j]))
            if lhs != rhs:
                rep._fail("jacobi", (i, j))
    # Leibniz: d ad_a - (-1)^{|a|} ad_a d = ad_{da}
    for i in range(n):
        lhs = d @ ads[i] - (ads[i] @ d).scale(_sign(degs[i]))
        rhs = L.ad(L.d({i: 1}))
        if lhs != rhs:
            rep._fail("leibniz", i)
    if L.pairing is not None:
        for key in ("pairing_degree", "pairing_symmetry", "pairing_invariance", "pairing_d_compatible",
                    "pairing_nondegenerate"):
            rep.items[key] = True
        K = L.pairing
        for i, j, _ in K.entries():
            if not same(degs[i] + degs[j], L.pairing_degree):
                rep._fail("pairing_degree", (i, j))
            if K[j, i] != _sign(degs[i] * degs[j]) * K[i, j]:
                rep._fail("pairing_symmetry", (i, j))
        for j in range(n):
            # κ([a, e_j], c) = κ(a, [e_j, c]) for all a, c
            if L.right_ad_basis(j).T @ K != K @ ads[j]:
                rep._fail("pairing_invariance", j)
        S = RationalMatrix(n, n, [{i: _sign(degs[i])} for i in range(n)])
        if not (d.T @ K + S @ K @ d).is_zero():
            rep._fail("pairing_d_compatible", "κ(da,b) + (-1)^|a| κ(a,db) != 0")
        if rank(K) != n:
            rep._fail("pairing_nondegenerate", f"rank {rank(K)} < {n}")
    return rep


# ---------------------------------------------------------------------------
# presets


def _elem(n: int, i: int, j: int) -> list[list[int]]:
    m = [[0] * n for _ in range(n)]
    m[i][j] = 1
    return m


def _matrix_algebra(name: str, mats: list[list[list[Fraction]]], labels: list[str]) -> DgLieAlgebra:
    n = len(mats[0])
    k = len(mats)
    flat = [[Fraction(m[r][c]) for r in range(n) for c in range(n)] for m in mats]
    B = RationalMatrix.from_columns(n * n, flat)

    def mm(a, b):
        return [[sum(Fraction(a[r][t]) * b[t][c] for t in range(n)) for c in range(n)] for r in range(n)]

    table = {}
    for a in range(k):
        for b in range(k):
            ab, ba = mm(mats[a], mats[b]), mm(mats[b], mats[a])
            com = [ab[r][c] - ba[r][c] for r in range(n) for c in range(n)]
            if any(com):
                x = solve(B, com)
                if x is None:
                    raise ConstructionError(f"{name} basis not closed under commutator")
                table[(a, b)] = {i: c for i, c in enumerate(x) if c}
    pair = RationalMatrix.from_rows([[sum(mm(mats[a], mats[b])[r][r] for r in range(n)) for b in range(k)]
                                     for a in range(k)])
    rep = [RationalMatrix.from_rows(m) for m in mats]
    return DgLieAlgebra([0] * k, table, pairing=pair, name=name, labels=labels, defining_rep=rep)


def gl(n: int) -> DgLieAlgebra:
    mats, labels = [], []
    for i in range(n):
        for j in range(n):
            mats.append(_elem(n, i, j))
            labels.append(f"E{i + 1}{j + 1}")
    return _matrix_algebra(f"gl{n}", mats, labels)


def sl(n: int) -> DgLieAlgebra:
    mats, labels = [], []
    for i in range(n):
        for j in range(n):
            if i != j:
                mats.append(_elem(n, i, j))
                labels.append(f"E{i + 1}{j + 1}")
    for i in range(n - 1):
        h = [[0] * n for _ in range(n)]
        h[i][i], h[i + 1][i + 1] = 1, -1
        mats.append(h)
        labels.append(f"H{i + 1}")
    return _matrix_algebra(f"sl{n}", mats, labels)


def so(n: int) -> DgLieAlgebra:
    mats, labels = [], []
    for i in range(n):
        for j in range(i + 1, n):
            m = [[0] * n for _ in range(n)]
            m[i][j], m[j][i] = 1, -1
            mats.append(m)
            labels.append(f"A{i + 1}{j + 1}")
    return _matrix_algebra(f"so{n}", mats, labels)


def abelian(n: int) -> DgLieAlgebra:
    return DgLieAlgebra([0] * n, {}, pairing=RationalMatrix.identity(n), name=f"abelian:{n}",
                        labels=[f"a{i + 1}" for i in range(n)])


def nonunimodular() -> DgLieAlgebra:
    """Two-dimensional algebra [e, f] = f; no invariant pairing."""
    return DgLieAlgebra.from_half_table([0, 0], {(0, 1): {1: 1}}, name="aff1", labels=["e", "f"])


PRESETS = ("sl2", "sl3", "gl2", "gl3", "so4", "abelian:n")


def preset(name: str) -> DgLieAlgebra:
    """Lie algebra preset by name: sl<n>, gl<n>, so<n>, abelian:<n>."""
    if name.startswith("abelian:"):
        return abelian(int(name.split(":", 1)[1]))
    if name == "aff1":
        return nonunimodular()
    for prefix, fn in (("sl", sl), ("gl", gl), ("so", so)):
        if name.startswith(prefix) and name[len(prefix):].isdigit():
            n = int(name[len(prefix):])
            if n < 1 or (prefix == "sl" and n < 2) or (prefix == "so" and n < 2):
                break
            return fn(n)
    raise KeyError(f"unknown Lie algebra preset {name!r}; known: {', '.join(PRESETS)}")


# ---------------------------------------------------------------------------
# commutative dg algebras


class CdgAlgebra:
    """Finite-dimensional graded-commutative dg algebra with extra derivations.

    ``derivations`` maps a name (``"dz1"``, ``"dz2"``) to ``(matrix, degree)``.
    ``trace`` is a linear functional (dense tuple) nonzero only in degree
    ``trace_degree``.
    """

    def __init__(self, degrees: Sequence[int], mult: Mapping[tuple[int, int], Mapping[int, object]],
                 unit: int = 0, differential: RationalMatrix | None = None,
                 derivations: Mapping[str, tuple[RationalMatrix, int]] | None = None,
                 trace: Sequence[object] | None = None, trace_degree: int = 0,
                 labels: Sequence[str] | None = None, name: str = ""):
        self.degrees = tuple(int(d) for d in degrees)
        n = len(self.degrees)
        self.mult = {k: _vec(v) for k, v in mult.items() if _vec(v)}
        self.unit = unit
        self.differential = differential if differential is not None else RationalMatrix.zeros(n, n)
        self.derivations = dict(derivations or {})
        self.trace = tuple(Fraction(t) for t in trace) if trace is not None else None
        self.trace_degree = trace_degree
        self.labels = tuple(labels) if labels else tuple(f"a{i}" for i in range(n))
        self.name = name

    @property
    def dim(self) -> int:
        return len(self.degrees)

    def mul(self, u: Mapping[int, object], v: Mapping[int, object]) -> Vec:
        out: Vec = {}
        for i, a in _vec(u).items():
            for j, b in _vec(v).items():
                w = self.mult.get((i, j))
                if w:
                    _axpy(out, a * b, w)
        return out

    def check(self) -> AxiomReport:
        """Unit, associativity, graded commutativity, Leibniz rules, commuting derivations."""
        rep = AxiomReport()
        n = self.dim
        e = lambda i: {i: Fraction(1)}
        for key in ("unit", "associativity", "commutativity", "d_squared", "leibniz", "derivations"):
            rep.items[key] = True
        for i in range(n):
            if self.mul(e(self.unit), e(i)) != e(i) or self.mul(e(i), e(self.unit)) != e(i):
                rep._fail("unit", i)
        for i, j, k in itertools.product(range(n), repeat=3):
            if self.mul(self.mul(e(i), e(j)), e(k)) != self.mul(e(i), self.mul(e(j), e(k))):
                rep._fail("associativity", (i, j, k))
        for i in range(n):
            for j in range(n):
                s = _sign(self.degrees[i] * self.degrees[j])
                a, b = self.mul(e(i), e(j)), self.mul(e(j), e(i))
                if a != {k: s * c for k, c in b.items()}:
                    rep._fail("commutativity", (i, j))
        ops = [("d", self.differential, 1)] + [(nm, m, dg) for nm, (m, dg) in self.derivations.items()]
        if not (self.differential @ self.differential).is_zero():
            rep._fail("d_squared", "d_A^2 != 0")
        for nm, m, dg in ops:
            for i in range(n):
                for j in range(n):
                    lhs = m.apply(self.mul(e(i), e(j)))
                    rhs = self.mul(m.apply(e(i)), e(j))
                    _axpy(rhs, _sign(dg * self.degrees[i]), self.mul(e(i), m.apply(e(j))))
                    if lhs != rhs:
                        rep._fail("leibniz", (nm, i, j))
        for (n1, m1, g1), (n2, m2, g2) in itertools.combinations(ops, 2):
            com = m1 @ m2 - (m2 @ m1).scale(_sign(g1 * g2))
            if not com.is_zero():
                rep._fail("derivations", (n1, n2))
        return rep

    def tensor(self, other: "CdgAlgebra", name: str = "") -> "CdgAlgebra":
        """A ⊗ B with Koszul signs; derivations D act as D⊗1 and ±1⊗D."""
        na, nb = self.dim, other.dim
        idx = lambda i, j: i * nb + j
        degs = [self.degrees[i] + other.degrees[j] for i in range(na) for j in range(nb)]
        mult = {}
        for (i1, i2), va in self.mult.items():
            for (j1, j2), vb in other.mult.items():
                s = _sign(other.degrees[j1] * self.degrees[i2])
                out: Vec = {}
                for k1, c1 in va.items():
                    for k2, c2 in vb.items():
                        out[idx(k1, k2)] = out.get(idx(k1, k2), 0) + s * c1 * c2
                mult[(idx(i1, j1), idx(i2, j2))] = out
        def left(m: RationalMatrix) -> RationalMatrix:
            ent = {}
            for r, c, v in m.entries():
                for j in range(nb):
                    ent[(idx(r, j), idx(c, j))] = v
            return RationalMatrix.from_entries(na * nb, na * nb, ent)
        def right(m: RationalMatrix, dg: int) -> RationalMatrix:
            ent = {}
            for r, c, v in m.entries():
                for i in range(na):
                    ent[(idx(i, r), idx(i, c))] = _sign(dg * self.degrees[i]) * v
            return RationalMatrix.from_entries(na * nb, na * nb, ent)
        diff = left(self.differential) + right(other.differential, 1)
        ders: dict[str, tuple[RationalMatrix, int]] = {}
        for nm, (m, dg) in self.derivations.items():
            ders[nm] = (left(m), dg)
        for nm, (m, dg) in other.derivations.items():
            if nm in ders:
                raise ValueError(f"derivation {nm!r} present on both factors")
            ders[nm] = (right(m, dg), dg)
        trace = None
        if self.trace is not None and other.trace is not None:
            trace = [self.trace[i] * other.trace[j] for i in range(na) for j in range(nb)]
        labels = [f"{a}{b}" if a != "1" and b != "1" else (b if a == "1" else a)
                  for a in self.labels for b in other.labels]
        return CdgAlgebra(degs, mult, idx(self.unit, other.unit), diff, ders, trace,
                          self.trace_degree + other.trace_degree, labels, name or f"{self.name}⊗{other.name}")


def point_cdga() -> CdgAlgebra:
    return CdgAlgebra([0], {(0, 0): {0: 1}}, trace=[1], labels=["1"], name="point")


def exterior_cdga(degree: int = -1, differential_to_unit: object = 0, name: str = "") -> CdgAlgebra:
    """Λ[θ] with θ odd of the given degree; optionally dθ = c·1 (needs degree -1)."""
    if not degree & 1:
        raise ValueError("exterior generator must have odd degree")
    c = Fraction(differential_to_unit)
    if c and degree != -1:
        raise ValueError("dθ = c·1 needs θ in degree -1")
    d = RationalMatrix.from_entries(2, 2, {(0, 1): c}) if c else None
    return CdgAlgebra([0, degree], {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}, 0, d,
                      trace=[0, 1], trace_degree=degree, labels=["1", "θ"], name=name or f"Λ[θ{degree:+d}]")


def _truncated_poly(degree: int, top: int, name: str) -> CdgAlgebra:
    """k[h]/(h^{top+1}) with h in the given even degree."""
    n = top + 1
    mult = {(i, j): {i + j: 1} for i in range(n) for j in range(n) if i + j < n}
    trace = [0] * n
    trace[top] = 1
    return CdgAlgebra([degree * i for i in range(n)], mult, trace=trace, trace_degree=degree * top,
                      labels=["1"] + [f"h{i}" if i > 1 else "h" for i in range(1, n)], name=name)


def _sphere(n: int) -> CdgAlgebra:
    mult = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}}
    return CdgAlgebra([0, n], mult, trace=[0, 1], trace_degree=n, labels=["1", f"ω{n}"], name=f"S{n}")


def cohomology_cdga(name: str) -> CdgAlgebra:
    """Cohomology rings with cup product and fundamental-class trace."""
    if name == "point":
        return point_cdga()
    if name.startswith("T") and name[1:].isdigit():
        k = int(name[1:])
        A = exterior_cdga(1, name="S1")
        A = CdgAlgebra(A.degrees, A.mult, trace=A.trace, trace_degree=1, labels=["1", "θ1"], name="S1")
        out = A
        for i in range(2, k + 1):
            B = CdgAlgebra(A.degrees, A.mult, trace=A.trace, trace_degree=1, labels=["1", f"θ{i}"], name="S1")
            out = out.tensor(B)
        return CdgAlgebra(out.degrees, out.mult, out.unit, trace=out.trace, trace_degree=out.trace_degree,
                          labels=out.labels, name=name if k > 1 else "S1")
    if name == "S1":
        return cohomology_cdga("T1")
    if name.startswith("S") and name[1:].isdigit():
        return _sphere(int(name[1:]))
    if name == "CP2":
        return _truncated_poly(2, 2, "CP2")
    if name == "S2xS2":
        out = _sphere(2).tensor(_sphere(2))
        return CdgAlgebra(out.degrees, out.mult, out.unit, trace=out.trace, trace_degree=4,
                          labels=["1", "a", "b", "ab"], name="S2xS2")
    raise KeyError(f"no cohomology ring for {name!r}")


def jet_cdga(variables: int = 2) -> CdgAlgebra:
    """Truncated jets: ⊗ of span{1, z, dz} (z^2 = z dz = 0) with D(z) = dz.

    The derivations are named ``dz1``, ``dz2``, ... and have degree +1; they
    model the holomorphic derivatives that the twist parameters switch on.
    """
    def one(i: int) -> CdgAlgebra:
        mult = {(0, 0): {0: 1}, (0, 1): {1: 1}, (1, 0): {1: 1}, (0, 2): {2: 1}, (2, 0): {2: 1}}
        D = RationalMatrix.from_entries(3, 3, {(2, 1): 1})
        return CdgAlgebra([0, 0, 1], mult, derivations={f"dz{i}": (D, 1)},
                          labels=["1", f"z{i}", f"dz{i}"], name=f"jet{i}")
    out = one(1)
    for i in range(2, variables + 1):
        out = out.tensor(one(i))
    out.name = f"jet^{variables}"
    return out


CDGA_PRESETS = ("point", "S1", "T2", "T3", "T4", "S2", "S3", "S4", "CP2", "S2xS2", "jet", "exterior")


def cdga_preset(name: str) -> CdgAlgebra:
    if name == "jet":
        return jet_cdga(2)
    if name == "exterior":
        return exterior_cdga(-1)
    return cohomology_cdga(name)


# ---------------------------------------------------------------------------
# constructions


def tensor_with_cdga(A: CdgAlgebra, L: DgLieAlgebra, derivation_coefficients: Mapping[str, object] | None = None,
                     with_pairing: bool | None = None, name: str = "") -> DgLieAlgebra:
    """A ⊗ L with bracket (a⊗x, b⊗y) -> (-1)^{|x||b|} ab⊗[x,y].

    ``derivation_coefficients`` adds ``c · D ⊗ 1`` to the differential for the
    named derivations of ``A`` (the twist parameters).  The pairing is
    ``tr_A(ab) κ(x, y)`` with the Koszul sign, built when both exist; pass
    ``with_pairing=True`` to demand it.
    """
    na, nl = A.dim, L.dim
    idx = lambda a, x: a * nl + x
    degs = [A.degrees[a] + L.degrees[x] for a in range(na) for x in range(nl)]
    table: dict[tuple[int, int], Vec] = {}
    for (a, b), ab in A.mult.items():
        for (x, y), xy in L.bracket_table.items():
            s = _sign(L.degrees[x] * A.degrees[b])
            out: Vec = {}
            for c, cc in ab.items():
                for z, cz in xy.items():
                    out[idx(c, z)] = out.get(idx(c, z), 0) + s * cc * cz
            out = {k: v for k, v in out.items() if v}
            if out:
                table[(idx(a, x), idx(b, y))] = out
    ent: dict[tuple[int, int], Fraction] = {}

    def add_left(m: RationalMatrix, coeff: Fraction):
        for r, c, v in m.entries():
            for x in range(nl):
                key = (idx(r, x), idx(c, x))
                ent[key] = ent.get(key, 0) + coeff * v

    add_left(A.differential, Fraction(1))
    for nm, coeff in (derivation_coefficients or {}).items():
        coeff = Fraction(coeff)
        if nm not in A.derivations:
            continue  # an absent derivation is the zero map
        m, dg = A.derivations[nm]
        if dg != 1 and coeff:
            raise ValueError(f"derivation {nm!r} has degree {dg}, cannot enter a differential")
        if coeff:
            add_left(m, coeff)
    for r, c, v in L.differential.entries():
        for a in range(na):
            key = (idx(a, r), idx(a, c))
            ent[key] = ent.get(key, 0) + _sign(A.degrees[a]) * v
    diff = RationalMatrix.from_entries(na * nl, na * nl, ent)
    pairing = None
    pdeg = 0
    want = with_pairing if with_pairing is not None else (A.trace is not None and L.pairing is not None)
    if want:
        if A.trace is None:
            raise ValueError(f"{A.name} has no trace functional; cannot build a pairing")
        if L.pairing is None:
            raise ValueError(f"{L.name} has no pairing")
        pe = {}
        for a in range(na):
            for b in range(na):
                tr = sum((A.trace[k] * c for k, c in A.mult.get((a, b), {}).items()), Fraction(0))
                if not tr:
                    continue
                for x, y, kv in L.pairing.entries():
                    pe[(idx(a, x), idx(b, y))] = _sign(L.degrees[x] * A.degrees[b]) * tr * kv
        pairing = RationalMatrix.from_entries(na * nl, na * nl, pe)
        pdeg = A.trace_degree + L.pairing_degree
    labels = [f"{A.labels[a]}⊗{L.labels[x]}" if A.labels[a] != "1" else L.labels[x]
              for a in range(na) for x in range(nl)]
    return DgLieAlgebra(degs, table, diff, pairing, pdeg, L.mode, labels,
                        name=name or f"{A.name}⊗{L.name}")


def epsilon_extend(L: DgLieAlgebra, eps_degree: int = -1, name: str = "") -> DgLieAlgebra:
    """L[ε] = L ⊕ εL with ε odd of degree ``eps_degree`` and ε^2 = 0.

    Written out directly; agrees with ``tensor_with_cdga(exterior_cdga(e), L)``.
    """
    if eps_degree not in (-1, 1):
        raise ValueError("ε must have degree ±1")
    n = L.dim
    e = eps_degree
    degs = list(L.degrees) + [g + e for g in L.degrees]
    table: dict[tuple[int, int], Vec] = {}
    for (i, j), v in L.bracket_table.items():
        table[(i, j)] = dict(v)
        # [x, εy] = (-1)^{|x||ε|} ε[x, y],  [εx, y] = ε[x, y]
        s = _sign(L.degrees[i] * e)
        table[(i, n + j)] = {n + k: s * c for k, c in v.items()}
        table[(n + i, j)] = {n + k: c for k, c in v.items()}
    ent = {}
    for r, c, v in L.differential.entries():
        ent[(r, c)] = v
        ent[(n + r, n + c)] = -v  # d(εx) = -ε dx
    diff = RationalMatrix.from_entries(2 * n, 2 * n, ent)
    pairing = None
    pdeg = 0
    if L.pairing is not None:
        pe = {}
        for i, j, v in L.pairing.entries():
            pe[(n + i, j)] = v
            pe[(i, n + j)] = _sign(L.degrees[i] * e) * v
        pairing = RationalMatrix.from_entries(2 * n, 2 * n, pe)
        pdeg = L.pairing_degree + e
    labels = list(L.labels) + [f"ε{l}" for l in L.labels]
    return DgLieAlgebra(degs, table, diff, pairing, pdeg, L.mode, labels,
                        name=name or f"{L.name}[ε{e:+d}]")


def hodge_family(L: DgLieAlgebra, t: object) -> DgLieAlgebra:
    """L[1] ⊕ L with the adjoint action on L[1] and t·id: L[1] -> L added to ℓ1."""
    t = Fraction(t)
    A = exterior_cdga(-1, differential_to_unit=t, name=f"Hod(t={t})")
    out = tensor_with_cdga(A, L, with_pairing=False, name=f"{L.name}_Hod(t={t})")
    # pairing is not part of the Hodge family; L[1] ⊕ L is kept in that order
    n = L.dim
    perm = list(range(n, 2 * n)) + list(range(n))
    return _permute(out, perm)


def _permute(L: DgLieAlgebra, perm: Sequence[int]) -> DgLieAlgebra:
    """Reorder the basis: new basis vector k is old basis vector perm[k]."""
    inv = {old: new for new, old in enumerate(perm)}
    table = {(inv[i], inv[j]): {inv[k]: c for k, c in v.items()} for (i, j), v in L.bracket_table.items()}
    d = RationalMatrix.from_entries(L.dim, L.dim, {(inv[r], inv[c]): v for r, c, v in L.differential.entries()})
    pair = None
    if L.pairing is not None:
        pair = RationalMatrix.from_entries(L.dim, L.dim, {(inv[r], inv[c]): v for r, c, v in L.pairing.entries()})
    return DgLieAlgebra([L.degrees[p] for p in perm], table, d, pair, L.pairing_degree, L.mode,
                        [L.labels[p] for p in perm], name=L.name)


def centralizer_basis(g: DgLieAlgebra, x: Mapping[int, object] | Sequence[object]) -> list[Vec]:
    """Exact basis of ker ad_x."""
    return [{i: c for i, c in enumerate(v) if c} for v in kernel_basis(g.ad(_vec(x)))]


def _centralizer_projection(g: DgLieAlgebra, x: Vec) -> RationalMatrix:
    """Projection onto g_x along im(ad_x)."""
    n = g.dim
    if not x:
        return RationalMatrix.identity(n)
    cx = centralizer_basis(g, x)
    _, im_rows = rref(g.ad(x).columns())
    B = RationalMatrix.from_columns(n, cx + im_rows)
    if rank(B) != n:
        raise ConstructionError("g_x meets im(ad_x) (x is not semisimple), so u·∂/∂ε on g_x "
                                "admits no square-zero extension")
    cols = []
    for j in range(n):
        coeffs = solve(B, {j: 1})
        v: Vec = {}
        for k, c in enumerate(coeffs[:len(cx)]):
            _axpy(v, c, cx[k])
        cols.append(v)
    return RationalMatrix.from_columns(n, cols)


def vacuum_twisted_algebra(A: CdgAlgebra, g: DgLieAlgebra, x: Mapping[int, object] | Sequence[object],
                           p: TwistPoint, eps_degree: int = -1) -> DgLieAlgebra:
    """A ⊗ g[ε] with differential d_A + t1 ∂_z1 + t2 ∂_z2 + ε ad_x + u ∂/∂ε|_{g_x}.

    The grading is collapsed to Z/2 when ``x`` or ``u`` is nonzero.  The
    assembled differential is checked to square to zero.
    """
    if any(d != 0 for d in g.degrees) or not g.differential.is_zero():
        raise ValueError("vacuum twisting needs an ordinary Lie algebra")
    x = _vec(x)
    if x and (g.pairing is None or rank(g.pairing) != g.dim):
        raise ValueError("a vacuum x != 0 needs a nondegenerate invariant pairing on g")
    p = p if isinstance(p, TwistPoint) else TwistPoint(*p)
    n = g.dim
    geps = epsilon_extend(g, eps_degree)
    # odd operator Φ on g[ε]: y -> ε[x, y];  εy -> u·proj_{g_x}(y)
    ent: dict[tuple[int, int], Fraction] = {}
    if x:
        for r, c, v in g.ad(x).entries():
            ent[(n + r, c)] = v
    if p.u:
        P = _centralizer_projection(g, x)
        for r, c, v in P.entries():
            ent[(r, n + c)] = ent.get((r, n + c), 0) + p.u * v
    phi = RationalMatrix.from_entries(2 * n, 2 * n, ent)
    base = tensor_with_cdga(A, geps, {"dz1": p.t1, "dz2": p.t2})
    m = geps.dim
    ext = {}
    for r, c, v in phi.entries():
        for a in range(A.dim):
            ext[(a * m + r, a * m + c)] = _sign(A.degrees[a]) * v
    D = base.differential + RationalMatrix.from_entries(base.dim, base.dim, ext)
    if not (D @ D).is_zero():
        raise ConstructionError("assembled vacuum differential does not square to zero")
    mode = "Z2" if (x or p.u) else base.mode
    xs = ",".join(str(x.get(i, 0)) for i in range(n))
    return base.with_differential(D, mode=mode,
                                  name=f"T^vac[{g.name}; x=({xs}); t=({p.t1},{p.t2},{p.u}); A={A.name}]")


def supertrace_of_power(L: DgLieAlgebra, x: Mapping[int, object], v: int) -> Fraction:
    """str((ad_x)^v) over L."""
    M = L.ad(_vec(x)).power(v)
    return supertrace(GradedMap(L.space, L.space, 0, M)) if M.nnz() else Fraction(0)
