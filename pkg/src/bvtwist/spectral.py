"""Spectral sequences of finitely filtered cochain complexes.

Filtrations are decreasing and basis-adapted: every basis vector carries a
level ``p`` and ``F^p`` is spanned by the vectors of level ``>= p``.  Pages are
computed from the exact subquotients

    Z_r^p = F^p ∩ d^{-1} F^{p+r}
    E_r^p = Z_r^p / (Z_{r-1}^{p+1} + d Z_{r-1}^{p-r+1})

so nothing is inferred from ranks of earlier pages; the relation
``E_{r+1} = H(E_r, d_r)`` is checked afterwards as a consistency condition.
"""
from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .exactlinalg import (MatrixComplex, RationalMatrix, _kernel_sparse, solve,
                          span_rank)

__all__ = ["FiltrationError", "FilteredComplex", "SpectralPages", "pages", "check_convergence",
           "associated_graded_cohomology", "BigradedComplex", "DifferentialPiece", "f2i_filtration",
           "antidiagonal_filtration", "random_filtered_complex"]


class FiltrationError(ValueError):
    """The differential does not respect the requested filtration."""


class FilteredComplex:
    """A bounded Z-graded complex with a basis-adapted decreasing filtration."""

    def __init__(self, complex: MatrixComplex, levels: Mapping[int, Sequence[int]]):
        if complex.periodic:
            raise ValueError("spectral sequences need a Z-graded complex")
        self.complex = complex
        self.levels = {k: tuple(levels.get(k, ())) for k in complex.degrees()}
        for k in complex.degrees():
            if len(self.levels[k]) != complex.dims[k - complex.offset]:
                raise ValueError(f"degree {k}: {len(self.levels[k])} levels for dim {complex.dims[k - complex.offset]}")
        bad = self.violations()
        if bad:
            raise FiltrationError(f"differential lowers the filtration level at {bad[:5]}")

    @classmethod
    def from_subspaces(cls, complex: MatrixComplex, filtration: Mapping[int, Sequence[Sequence[Mapping[int, object]]]]):
        """Build from nested subspaces ``filtration[k] = [F^0, F^1, ...]`` (each a list of vectors).

        A basis adapted to the flag is chosen and the differential rewritten in it.
        """
        bases, levels = {}, {}
        for k in complex.degrees():
            n = complex.dims[k - complex.offset]
            flag = list(filtration.get(k, []))
            chosen: list[dict[int, Fraction]] = []
            lv: list[int] = []
            for p in range(len(flag) - 1, -1, -1):
                for v in flag[p]:
                    v = {i: Fraction(c) for i, c in (v.items() if isinstance(v, Mapping) else enumerate(v)) if c}
                    if span_rank(chosen + [v]) > len(chosen):
                        chosen.append(v)
                        lv.append(p)
            if flag and span_rank(flag[0]) != n:
                raise FiltrationError(f"F^0 in degree {k} is not the whole space")
            for i in range(n):
                e = {i: Fraction(1)}
                if span_rank(chosen + [e]) > len(chosen):
                    chosen.append(e)
                    lv.append(0)
            bases[k] = RationalMatrix.from_columns(n, chosen)
            levels[k] = lv
        diffs = []
        for k in list(complex.degrees())[:-1]:
            d = complex.differential(k)
            img = d @ bases[k]
            cols = []
            for j in range(img.ncols):
                x = solve(bases[k + 1], img.column(j))
                cols.append({i: c for i, c in enumerate(x) if c})
            diffs.append(RationalMatrix.from_columns(bases[k + 1].ncols, cols))
        cx = MatrixComplex(complex.dims, diffs, offset=complex.offset)
        return cls(cx, levels)

    def violations(self) -> list[tuple[int, int, int]]:
        out = []
        for k in list(self.complex.degrees())[:-1]:
            src, tgt = self.levels[k], self.levels[k + 1]
            for i, j, _ in self.complex.differential(k).entries():
                if tgt[i] < src[j]:
                    out.append((k, j, i))
        return out

    def level_range(self) -> tuple[int, int]:
        allv = [p for lv in self.levels.values() for p in lv]
        return (min(allv), max(allv)) if allv else (0, 0)

    def length(self) -> int:
        lo, hi = self.level_range()
        return hi - lo

    def _F(self, k: int, p: int) -> list[int]:
        return [i for i, q in enumerate(self.levels.get(k, ())) if q >= p]

    def Z(self, k: int, p: int, r: int) -> list[dict[int, Fraction]]:
        """Basis of F^p ∩ d^{-1} F^{p+r} in degree k."""
        cols = self._F(k, p)
        if not cols:
            return []
        tgt_levels = self.levels.get(k + 1, ())
        low_rows = [i for i, q in enumerate(tgt_levels) if q < p + r]
        if not low_rows:
            return [{c: Fraction(1)} for c in cols]
        d = self.complex.differential(k)
        sub = d.submatrix(low_rows, cols)
        return [{cols[j]: c for j, c in v.items()} for v in _kernel_sparse(sub)]

    def d_image(self, k: int, vecs: Sequence[Mapping[int, Fraction]]) -> list[dict[int, Fraction]]:
        d = self.complex.differential(k)
        return [d.apply(v) for v in vecs]


@dataclass
class SpectralPages:
    """Page dimensions ``E[r][(p, k)]`` and ranks of ``d_r`` out of each block."""

    E: list[dict[tuple[int, int], int]]
    ranks: list[dict[tuple[int, int], int]]
    stable_from: int
    notes: list[str] = field(default_factory=list)

    def page(self, r: int) -> dict[tuple[int, int], int]:
        return self.E[min(r, len(self.E) - 1)]

    @property
    def E_infinity(self) -> dict[tuple[int, int], int]:
        return self.E[-1]

    def totals(self, r: int | None = None) -> dict[int, int]:
        page = self.E_infinity if r is None else self.page(r)
        out: dict[int, int] = {}
        for (p, k), v in page.items():
            out[k] = out.get(k, 0) + v
        return dict(sorted(out.items()))

    def consistent(self) -> bool:
        """E_{r+1} = H(E_r, d_r) blockwise and dims nonincreasing in r."""
        for r in range(len(self.E) - 1):
            for (p, k), v in self.E[r].items():
                out_rank = self.ranks[r].get((p, k), 0)
                in_rank = self.ranks[r].get((p - r, k - 1), 0)
                if self.E[r + 1].get((p, k), 0) != v - out_rank - in_rank:
                    return False
                if self.E[r + 1].get((p, k), 0) > v:
                    return False
        return True

    def as_dict(self) -> dict:
        return {"stable_from": self.stable_from,
                "pages": [{f"{p},{k}": v for (p, k), v in sorted(E.items()) if v} for E in self.E],
                "ranks": [{f"{p},{k}": v for (p, k), v in sorted(R.items()) if v} for R in self.ranks]}


def _subquotient_dim(num: Sequence[Mapping[int, Fraction]], den: Sequence[Mapping[int, Fraction]]) -> int:
    return span_rank(list(num) + list(den)) - span_rank(den)


def pages(f: FilteredComplex, r_max: int | None = None) -> SpectralPages:
    """E_r dims for r = 0..r_max (default: until guaranteed stable)."""
    lo, hi = f.level_range()
    N = hi - lo
    if r_max is None:
        r_max = N + 2
    degs = list(f.complex.degrees())
    Zc: dict[tuple[int, int, int], list] = {}

    def Z(k, p, r):
        key = (k, p, r)
        if key not in Zc:
            if k not in f.levels:
                Zc[key] = []
            else:
                # clamp p so the cache stays finite
                pp = min(max(p, lo), hi + 1)
                rr = r + (p - pp)
                Zc[key] = f.Z(k, pp, rr) if p <= hi else []
        return Zc[key]

    def dZ(k, p, r):
        if k - 1 not in f.levels:
            return []
        return f.d_image(k - 1, Z(k - 1, p, r))

    def denom(k, p, r):
        return list(Z(k, p + 1, r - 1)) + dZ(k, p - r + 1, r - 1)

    E_list, R_list = [], []
    for r in range(r_max + 1):
        E, R = {}, {}
        for k in degs:
            for p in range(lo, hi + 1):
                num = Z(k, p, r)
                den = denom(k, p, r)
                E[(p, k)] = _subquotient_dim(num, den)
                if k + 1 in f.levels and E[(p, k)]:
                    tgt_den = denom(k + 1, p + r, r)
                    R[(p, k)] = _subquotient_dim(f.d_image(k, num), tgt_den)
                else:
                    R[(p, k)] = 0
        E_list.append(E)
        R_list.append(R)
    stable = len(E_list) - 1
    while stable > 0 and E_list[stable - 1] == E_list[-1]:
        stable -= 1
    notes = []
    if r_max < N + 1:
        notes.append(f"r_max={r_max} below the guaranteed stabilisation page {N + 1}")
    return SpectralPages(E_list, R_list, stable, notes)


def associated_graded_cohomology(f: FilteredComplex) -> dict[tuple[int, int], int]:
    """dim F^p H^k / F^{p+1} H^k, computed directly from cycles and boundaries."""
    lo, hi = f.level_range()
    out = {}
    for k in f.complex.degrees():
        bnd = [f.complex.differential(k - 1).column(j) for j in range(f.complex.dims[k - 1 - f.complex.offset])] \
            if k - 1 in f.levels else []
        base = span_rank(bnd)
        prev = None
        for p in range(hi + 1, lo - 1, -1):
            cyc = f.Z(k, p, 10 ** 6) if f._F(k, p) else []
            dim = span_rank(list(cyc) + bnd) - base
            if prev is not None:
                out[(p, k)] = dim - prev
            prev = dim
    return out


def check_convergence(f: FilteredComplex, computed: SpectralPages | None = None) -> bool:
    """True iff the stabilised page equals gr of the total cohomology."""
    sp = computed if computed is not None else pages(f)
    gr = associated_graded_cohomology(f)
    einf = sp.E_infinity
    keys = set(gr) | set(einf)
    return all(gr.get(k, 0) == einf.get(k, 0) for k in keys) and sp.consistent()


# ---------------------------------------------------------------------------
# bigraded inputs


@dataclass(frozen=True)
class DifferentialPiece:
    """Part of the differential shifting the bidegree by (dm, dn).

    ``matrices[k]`` maps degree k to k+1 in the complex's bases.
    """

    label: str
    dm: int
    dn: int
    matrices: Mapping[int, RationalMatrix]


class BigradedComplex:
    """Cochain complex whose basis vectors carry bidegrees ``(m, n)``.

    For the free-to-interacting filtration ``m`` is the ħ-power and ``n`` the
    Sym-weight; for the anti-diagonal one ``m`` is base weight and ``n`` fiber
    weight.  Each piece is checked against its declared shift.
    """

    def __init__(self, dims: Mapping[int, int], bidegrees: Mapping[int, Sequence[tuple[int, int]]],
                 pieces: Sequence[DifferentialPiece]):
        self.degree_list = sorted(dims)
        lo, hi = self.degree_list[0], self.degree_list[-1]
        if self.degree_list != list(range(lo, hi + 1)):
            raise ValueError("degrees must be contiguous")
        self.dims = dict(dims)
        self.bidegrees = {k: tuple(tuple(b) for b in bidegrees[k]) for k in self.degree_list}
        self.pieces = tuple(pieces)
        for pc in self.pieces:
            for k, m in pc.matrices.items():
                if m.shape != (self.dims.get(k + 1, 0), self.dims[k]):
                    raise ValueError(f"piece {pc.label!r} degree {k}: shape {m.shape}")
                for i, j, _ in m.entries():
                    (m0, n0), (m1, n1) = self.bidegrees[k][j], self.bidegrees[k + 1][i]
                    if (m1 - m0, n1 - n0) != (pc.dm, pc.dn):
                        raise ValueError(f"piece {pc.label!r} has an entry of shift {(m1 - m0, n1 - n0)}, "
                                         f"declared {(pc.dm, pc.dn)}")
        self.offset = lo

    def total(self, keep=None) -> MatrixComplex:
        diffs = []
        for k in self.degree_list[:-1]:
            m = RationalMatrix.zeros(self.dims[k + 1], self.dims[k])
            for pc in self.pieces:
                if (keep is None or keep(pc)) and k in pc.matrices:
                    m = m + pc.matrices[k]
            diffs.append(m)
        return MatrixComplex([self.dims[k] for k in self.degree_list], diffs, offset=self.offset)

    def shift_n(self, c: int) -> "BigradedComplex":
        return BigradedComplex(self.dims, {k: [(m, n + c) for m, n in v] for k, v in self.bidegrees.items()},
                               self.pieces)


@dataclass
class AdaptedFiltration:
    """A FilteredComplex produced by a bigraded adapter plus its bookkeeping."""

    filtered: FilteredComplex
    graded_pieces: list[str]
    dropped_pieces: list[str]
    level_rule: str

    def graded_complex(self, source: BigradedComplex) -> MatrixComplex:
        keep = set(self.graded_pieces)
        return source.total(lambda pc: pc.label in keep)


def _adapt(bc: BigradedComplex, level, shift, rule: str, forbid: str) -> AdaptedFiltration:
    bad = [pc.label for pc in bc.pieces if shift(pc) < 0]
    if bad:
        raise FiltrationError(f"pieces {bad} violate {forbid}")
    levels = {k: [level(m, n) for m, n in bc.bidegrees[k]] for k in bc.degree_list}
    fc = FilteredComplex(bc.total(), levels)
    graded = [pc.label for pc in bc.pieces if shift(pc) == 0]
    dropped = [pc.label for pc in bc.pieces if shift(pc) > 0]
    return AdaptedFiltration(fc, graded, dropped, rule)


def f2i_filtration(bc: BigradedComplex) -> AdaptedFiltration:
    """Filtration by 2m + n (m = ħ-power, n = Sym-weight); pieces need 2Δm + Δn ≥ 0."""
    return _adapt(bc, lambda m, n: 2 * m + n, lambda pc: 2 * pc.dm + pc.dn, "2m+n",
                  "2Δm + Δn ≥ 0")


def antidiagonal_filtration(bc: BigradedComplex) -> AdaptedFiltration:
    """Filtration by fiber weight minus base weight.

    Pieces must not raise n − m; a piece that does signals a linear quantum
    term.  Stored as the decreasing filtration by ``m − n``.
    """
    return _adapt(bc, lambda m, n: m - n, lambda pc: pc.dm - pc.dn, "n-m (increasing)",
                  "Δ(n − m) ≤ 0 (a linear quantum term is present)")


# ---------------------------------------------------------------------------
# random test complexes


def random_filtered_complex(seed: int, max_dim: int = 40, max_level: int = 3,
                            degrees: int = 4) -> FilteredComplex:
    """Seeded random filtered complex with d preserving the filtration.

    Built as ``B D B^{-1}`` where ``D`` pairs basis vectors (target level at
    least source level) and ``B`` is unitriangular with respect to the levels,
    so the spectral sequence is generically nontrivial.
    """
    rng = random.Random(seed)
    total = rng.randint(degrees, max_dim)
    dims = [0] * degrees
    for _ in range(total):
        dims[rng.randrange(degrees)] += 1
    levels = {k: [rng.randint(0, max_level) for _ in range(dims[k])] for k in range(degrees)}
    # standard differential: disjoint pairs (k, j) -> (k+1, i) with level(i) >= level(j)
    D = [dict() for _ in range(degrees - 1)]
    used_tgt = [set() for _ in range(degrees)]
    for k in range(degrees - 1):
        srcs = [j for j in range(dims[k]) if j not in used_tgt[k]]
        rng.shuffle(srcs)
        for j in srcs:
            cands = [i for i in range(dims[k + 1]) if i not in used_tgt[k + 1]
                     and levels[k + 1][i] >= levels[k][j]]
            if cands and rng.random() < 0.7:
                i = rng.choice(cands)
                D[k][(i, j)] = Fraction(1)
                used_tgt[k + 1].add(i)  # hit vectors never become sources, so D^2 = 0

    def unitri(k):
        n = dims[k]
        ent = {(i, i): Fraction(1) for i in range(n)}
        for i in range(n):
            for j in range(n):
                if i != j and levels[k][i] >= levels[k][j] and rng.random() < 0.3:
                    if (levels[k][i], i) > (levels[k][j], j):
                        ent[(i, j)] = Fraction(rng.randint(-3, 3))
        return RationalMatrix.from_entries(n, n, ent)

    B = [unitri(k) for k in range(degrees)]
    Binv = []
    for k in range(degrees):
        cols = [solve(B[k], {j: 1}) for j in range(dims[k])]
        Binv.append(RationalMatrix.from_columns(dims[k], [{i: c for i, c in enumerate(v) if c} for v in cols]))
    diffs = []
    for k in range(degrees - 1):
        Dk = RationalMatrix.from_entries(dims[k + 1], dims[k], D[k])
        diffs.append(B[k + 1] @ Dk @ Binv[k])
    cx = MatrixComplex(dims, diffs)
    return FilteredComplex(cx, levels)
