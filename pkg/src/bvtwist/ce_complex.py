"""Chevalley–Eilenberg cochains of finite-dimensional dg Lie algebras.

The cochains are the free graded-commutative algebra on coordinates ``ξ^i``
(dual to ``e_i``, degree ``1 - |e_i|``) tensored with ``Sym`` of a coefficient
module.  The differential is the derivation

    Q ξ^k = -Σ_i D_ki ξ^i - ½ Σ_ij σ_ij c^k_ij ξ^i ξ^j
    Q m = d_M m + Σ_i ξ^i ρ(e_i) m        (m a basis vector of M)

with ``σ_ij = (-1)^{|e_i| (|e_j| + 1)}``, extended by the Leibniz rule.  The
``ξ``-weight (number of ``ξ`` factors) is capped at ``max_weight``; since ``Q``
never lowers it, the capped object is the quotient complex by weight > cap and
``Q^2 = 0`` holds on it exactly.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .dg_lie import DgLieAlgebra
from .exactlinalg import ComplexError, MatrixComplex, RationalMatrix, cohomology_dims, rank
from .graded_core import free_cga_table, sort_with_sign

__all__ = ["ModuleSpec", "CEComplex", "CECohomology", "build_ce", "ce_cohomology",
           "augmentation_filtration", "invariant_dimension"]

Monomial = tuple  # sorted generator indices


def _sign(k: int) -> int:
    return -1 if k & 1 else 1


@dataclass(frozen=True)
class ModuleSpec:
    """Coefficient module ``M`` (basis degrees, action, differential) and the Sym powers used.

    ``action[i]`` is the matrix of ``e_i`` on ``M``.  With ``sym_powers=(0,)``
    the coefficients are trivial.
    """

    kind: str
    degrees: tuple[int, ...] = ()
    action: tuple[RationalMatrix, ...] = ()
    differential: RationalMatrix | None = None
    sym_powers: tuple[int, ...] = (0,)

    @classmethod
    def trivial(cls) -> "ModuleSpec":
        return cls("trivial")

    @classmethod
    def coadjoint(cls, L: DgLieAlgebra, sym_powers: Sequence[int] = (1,)) -> "ModuleSpec":
        """``L^*`` with ``(e_i · e^a)(e_b) = -e^a([e_i, e_b])``."""
        n = L.dim
        acts = []
        for i in range(n):
            ent = {}
            for b in range(n):
                for a, c in L.bracket_table.get((i, b), {}).items():
                    # coefficient of e^b in e_i · e^a, Koszul sign for passing e_i over e^a
                    ent[(b, a)] = -_sign(L.degrees[i] * L.degrees[a]) * c
            acts.append(RationalMatrix.from_entries(n, n, ent))
        d = None
        if not L.differential.is_zero():
            d = L.differential.T.scale(-1)
        return cls("coadjoint", tuple(-g for g in L.degrees), tuple(acts), d, tuple(sym_powers))

    @classmethod
    def adjoint(cls, L: DgLieAlgebra, sym_powers: Sequence[int] = (1,)) -> "ModuleSpec":
        acts = tuple(L.ad_basis(i) for i in range(L.dim))
        return cls("adjoint", tuple(L.degrees), acts, L.differential if not L.differential.is_zero() else None,
                   tuple(sym_powers))

    @property
    def dim(self) -> int:
        return len(self.degrees)


class CEComplex:
    """CE cochains with coefficients, split into weight blocks.

    Blocks are keyed by ``(degree, weight, module_weight)``; ``d0`` keeps the
    weight and ``d1`` raises it by one.
    """

    def __init__(self, L: DgLieAlgebra, module: ModuleSpec, max_weight: int, window: tuple[int, int]):
        self.L = L
        self.module = module
        self.max_weight = max_weight
        self.window = window
        n = L.dim
        self.n_xi = n
        self.gen_degrees = tuple(1 - g for g in L.degrees) + tuple(module.degrees)
        self._build_generator_images()
        lo, hi = window
        self.blocks: dict[tuple[int, int, int], list[Monomial]] = {}
        for mono in self._enumerate(lo - 1, hi + 1):
            key = (self.degree(mono), self.weight(mono), len(mono) - self.weight(mono))
            self.blocks.setdefault(key, []).append(mono)
        for v in self.blocks.values():
            v.sort()
        self.degree_basis: dict[int, list[Monomial]] = {}
        for key in sorted(self.blocks):
            self.degree_basis.setdefault(key[0], []).extend(self.blocks[key])
        for d in range(lo - 1, hi + 2):
            self.degree_basis.setdefault(d, [])
        self.index = {d: {m: i for i, m in enumerate(b)} for d, b in self.degree_basis.items()}
        if not any(self.degree_basis[d] for d in range(lo, hi + 1)):
            raise ValueError(f"degree window {window} with weight cap {max_weight} is empty")
        self._mats: dict[tuple[str, int], RationalMatrix] = {}

    # -- generators -----------------------------------------------------
    def _build_generator_images(self) -> None:
        L, M = self.L, self.module
        n = L.dim
        degs = L.degrees
        lin: list[list[tuple[Fraction, Monomial]]] = [[] for _ in range(n + M.dim)]
        quad: list[list[tuple[Fraction, Monomial]]] = [[] for _ in range(n + M.dim)]
        for r, c, v in L.differential.entries():
            lin[r].append((-v, (c,)))
        for (i, j), vec in L.bracket_table.items():
            s = _sign(degs[i] * (degs[j] + 1))
            for k, c in vec.items():
                quad[k].append((-Fraction(1, 2) * s * c, (i, j)))
        if M.differential is not None:
            for r, c, v in M.differential.entries():
                lin[n + c].append((v, (n + r,)))
        for i, rho in enumerate(M.action):
            for r, c, v in rho.entries():
                quad[n + c].append((v, (i, n + r)))
        self._lin = [self._collect(t) for t in lin]
        self._quad = [self._collect(t) for t in quad]

    def _collect(self, terms) -> dict[Monomial, Fraction]:
        out: dict[Monomial, Fraction] = {}
        for c, word in terms:
            res = self.multiply(word)
            if res is None:
                continue
            s, m = res
            out[m] = out.get(m, 0) + s * c
        return {m: c for m, c in out.items() if c}

    def multiply(self, word: Sequence[int]) -> tuple[int, Monomial] | None:
        """Canonical form of a product of generators: (sign, monomial) or None if zero."""
        degs = [self.gen_degrees[g] for g in word]
        mono, s = sort_with_sign(tuple(word), degs)
        for a, b in zip(mono, mono[1:]):
            if a == b and self.gen_degrees[a] & 1:
                return None
        return s, mono

    def degree(self, mono: Monomial) -> int:
        return sum(self.gen_degrees[g] for g in mono)

    def weight(self, mono: Monomial) -> int:
        return sum(1 for g in mono if g < self.n_xi)

    # -- enumeration ----------------------------------------------------
    def _enumerate(self, dlo: int, dhi: int):
        n_xi = self.n_xi
        gd = self.gen_degrees
        W = self.max_weight
        mod_powers = set(self.module.sym_powers)
        kmax = max(mod_powers)
        ngen = len(gd)
        # suffix minima of generator degrees bound the degree still reachable
        bounded = all(d > 0 for d in gd[:n_xi])

        def rec(start, mono, deg, w, k):
            if k in mod_powers and dlo <= deg <= dhi:
                yield tuple(mono)
            for g in range(start, ngen):
                is_xi = g < n_xi
                if is_xi and w >= W:
                    continue
                if not is_xi and k >= kmax:
                    continue
                if mono and mono[-1] == g and gd[g] & 1:
                    continue
                nd = deg + gd[g]
                if bounded and is_xi and nd > dhi + self._module_slack(k):
                    continue
                mono.append(g)
                yield from rec(g, mono, nd, w + is_xi, k + (not is_xi))
                mono.pop()

        yield from rec(0, [], 0, 0, 0)

    def _module_slack(self, k: int) -> int:
        """Largest amount the remaining module generators can lower the degree."""
        md = self.module.degrees
        if not md:
            return 0
        rest = max(self.module.sym_powers) - k
        return max(0, -min(md)) * rest

    # -- differentials --------------------------------------------------
    def _apply(self, mono: Monomial, which: str) -> dict[Monomial, Fraction]:
        images = self._lin if which == "d0" else self._quad
        out: dict[Monomial, Fraction] = {}
        prefix_deg = 0
        for p, g in enumerate(mono):
            s0 = _sign(prefix_deg)
            for m, c in images[g].items():
                res = self.multiply(mono[:p] + m + mono[p + 1:])
                if res is not None:
                    s, canon = res
                    out[canon] = out.get(canon, 0) + s0 * s * c
            prefix_deg += self.gen_degrees[g]
        return {m: c for m, c in out.items() if c}

    def matrix(self, which: str, degree: int) -> RationalMatrix:
        """``d0``, ``d1`` or ``d`` from ``degree`` to ``degree + 1`` (weights beyond the cap dropped)."""
        key = (which, degree)
        if key in self._mats:
            return self._mats[key]
        if which == "d":
            m = self.matrix("d0", degree) + self.matrix("d1", degree)
        else:
            src = self.degree_basis.get(degree, [])
            tgt_index = self.index.get(degree + 1, {})
            ent = {}
            for j, mono in enumerate(src):
                for im, c in self._apply(mono, which).items():
                    if self.weight(im) > self.max_weight:
                        continue
                    i = tgt_index.get(im)
                    if i is None:
                        raise ComplexError(f"image monomial {im} outside the enumerated basis")
                    ent[(i, j)] = c
            m = RationalMatrix.from_entries(len(tgt_index), len(src), ent)
        self._mats[key] = m
        return m

    def complex(self, which: str = "d") -> MatrixComplex:
        lo, hi = self.window
        degs = list(range(lo - 1, hi + 2))
        return MatrixComplex([len(self.degree_basis[d]) for d in degs],
                             [self.matrix(which, d) for d in degs[:-1]], offset=lo - 1)

    def block_dims(self) -> dict[tuple[int, int, int], int]:
        return {k: len(v) for k, v in sorted(self.blocks.items())}

    def weight_of_index(self, degree: int) -> list[int]:
        return [self.weight(m) for m in self.degree_basis[degree]]

    def square_report(self) -> dict[str, bool]:
        """d^2 = 0, d0^2 = 0 and d0 d1 + d1 d0 = -d1^2 on all in-window degrees."""
        lo, hi = self.window
        out = {"d_squared": True, "d0_squared": True, "mixed": True}
        for d in range(lo - 1, hi):
            a0, a1 = self.matrix("d0", d), self.matrix("d1", d)
            b0, b1 = self.matrix("d0", d + 1), self.matrix("d1", d + 1)
            if not (self.matrix("d", d + 1) @ self.matrix("d", d)).is_zero():
                out["d_squared"] = False
            if not (b0 @ a0).is_zero():
                out["d0_squared"] = False
            if b0 @ a1 + b1 @ a0 != -(b1 @ a1):
                out["mixed"] = False
        return out

    def truncated_degrees(self) -> set[int]:
        """Degrees whose cohomology could see monomials beyond the weight cap."""
        lo, hi = self.window
        xi = self.gen_degrees[:self.n_xi]
        md = self.module.degrees
        if any(d <= 0 for d in xi):
            return set(range(lo, hi + 1))
        # degrees reachable at weight > cap: check weights up to the largest that could fit
        slack = max(0, -min(md)) * max(self.module.sym_powers) if md else 0
        top = hi + 1 + slack
        mdeg_range = {0}
        if md:
            for k in self.module.sym_powers:
                t = free_cga_table(md, k)
                mdeg_range |= {deg for (w, deg) in t if w == k}
        over = set()
        wmax = top - min(mdeg_range) if top - min(mdeg_range) > 0 else 0
        if wmax > self.max_weight:
            table = free_cga_table(xi, wmax)
            for (w, deg), c in table.items():
                if w > self.max_weight and c:
                    for m in mdeg_range:
                        over.add(deg + m)
        return {d for d in range(lo, hi + 1) if over & {d - 1, d, d + 1}}


def build_ce(L: DgLieAlgebra, coeffs: ModuleSpec | None = None, max_weight: int | None = None,
             degree_window: tuple[int, int] | None = None, check: bool = True) -> CEComplex:
    """Assemble CE cochains; verifies ``d^2 = 0`` inside the caps."""
    coeffs = coeffs or ModuleSpec.trivial()
    if coeffs.dim and len(coeffs.action) != L.dim:
        raise ValueError("module action must have one matrix per basis element")
    if max_weight is None:
        max_weight = L.dim if all(g == 0 for g in L.degrees) else 4
    if degree_window is None:
        degree_window = (0, max_weight)
    if max_weight < 0 or degree_window[0] > degree_window[1]:
        raise ValueError("caps give an empty window")
    c = CEComplex(L, coeffs, max_weight, degree_window)
    if check:
        rep = c.square_report()
        if not rep["d_squared"]:
            raise ComplexError(f"CE differential does not square to zero for {L.name}")
    return c


@dataclass
class CECohomology:
    """Cohomology dims per degree and whether each is exact or truncated."""

    dims: dict[int, int]
    flags: dict[int, str]
    caps: dict[str, object] = field(default_factory=dict)

    def as_list(self) -> list[int]:
        return [self.dims[k] for k in sorted(self.dims)]


def ce_cohomology(c: CEComplex) -> CECohomology:
    full = cohomology_dims(c.complex("d"))
    lo, hi = c.window
    trunc = c.truncated_degrees()
    dims = {d: full[d] for d in range(lo, hi + 1)}
    flags = {d: ("truncated" if d in trunc else "exact") for d in dims}
    return CECohomology(dims, flags, {"max_weight": c.max_weight, "degree_window": list(c.window),
                                      "module": c.module.kind, "sym_powers": list(c.module.sym_powers)})


def augmentation_filtration(c: CEComplex):
    """Decreasing filtration by ξ-weight ≥ k, as a FilteredComplex."""
    from .spectral import FilteredComplex

    cx = c.complex("d")
    levels = {}
    for d in cx.degrees():
        levels[d] = c.weight_of_index(d)
    return FilteredComplex(cx, levels)


def invariant_dimension(L: DgLieAlgebra, module: ModuleSpec, power: int) -> int:
    """dim of the L-invariants in Sym^power(M), read off CE degree 0 cohomology."""
    spec = ModuleSpec(module.kind, module.degrees, module.action, module.differential, (power,))
    c = build_ce(L, spec, max_weight=1, degree_window=(0, 0), check=False)
    d0 = c.matrix("d", 0)
    basis = c.degree_basis[0]
    # only weight-0 cochains; invariants are the kernel of the coaction
    cols = [j for j, m in enumerate(basis) if c.weight(m) == 0]
    sub = d0.submatrix(range(d0.nrows), cols)
    return len(cols) - rank(sub)
