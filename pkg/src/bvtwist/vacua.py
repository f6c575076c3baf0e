"""Vacua of the twisted theories at the level of points of g*/G.

A vacuum is an element ``x`` of ``g`` (identified with ``g*`` through the
pairing).  Quantities computed at ``x`` are checked to be conjugation
invariant, which is how a family over the quotient stack is represented here.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

from .dg_lie import (CdgAlgebra, ConstructionError, DgLieAlgebra, TwistPoint, centralizer_basis, preset,
                     vacuum_twisted_algebra)
from .exactlinalg import RationalMatrix, rank, rref, solve, span_rank

__all__ = ["VacuumPoint", "centralizer", "BreakingDecomposition", "breaking_decomposition",
           "broken_theory_check", "coarse_moduli_map", "conjugate", "point_from_matrix",
           "VACUUM_CATALOGUE", "catalogue_point", "char_poly_coefficients"]


@dataclass(frozen=True)
class VacuumPoint:
    g: DgLieAlgebra
    x: tuple[Fraction, ...]

    def __init__(self, g: DgLieAlgebra, x: Sequence[object] | Mapping[int, object]):
        if isinstance(x, Mapping):
            coords = [Fraction(0)] * g.dim
            for i, c in x.items():
                coords[int(i)] = Fraction(c)
        else:
            coords = [Fraction(c) for c in x]
        if len(coords) != g.dim:
            raise ValueError(f"{g.name} has dimension {g.dim}, got {len(coords)} coordinates")
        object.__setattr__(self, "g", g)
        object.__setattr__(self, "x", tuple(coords))

    @property
    def vec(self) -> dict[int, Fraction]:
        return {i: c for i, c in enumerate(self.x) if c}

    def matrix(self) -> RationalMatrix:
        rep = self.g.defining_rep
        if rep is None:
            raise ValueError(f"{self.g.name} has no defining representation")
        m = RationalMatrix.zeros(*rep[0].shape)
        for i, c in self.vec.items():
            m = m + rep[i].scale(c)
        return m


def centralizer(p: VacuumPoint) -> list[dict[int, Fraction]]:
    """Exact basis of g_x = ker ad_x."""
    return centralizer_basis(p.g, p.vec)


@dataclass
class BreakingDecomposition:
    centralizer: list[dict[int, Fraction]]
    image: list[dict[int, Fraction]]
    checks: dict[str, bool] = field(default_factory=dict)

    @property
    def dims(self) -> tuple[int, int]:
        return len(self.centralizer), len(self.image)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def as_dict(self) -> dict:
        return {"dim_centralizer": self.dims[0], "rank_ad_x": self.dims[1], "checks": dict(self.checks),
                "passed": self.passed}


def breaking_decomposition(p: VacuumPoint) -> BreakingDecomposition:
    """g_x, im(ad_x) and the exact checks relating them.

    ``direct_sum`` (g = g_x ⊕ im ad_x) holds exactly when ad_x is semisimple on
    its image; it fails for nilpotent x, which the report shows.
    """
    g = p.g
    if g.pairing is None or rank(g.pairing) != g.dim:
        raise ValueError(f"{g.name}: the pairing is missing or degenerate")
    A = g.ad(p.vec)
    gx = centralizer(p)
    im = [c for c in A.columns() if c]
    _, im_basis = rref(im)
    checks = {}
    checks["dimension"] = len(gx) + len(im_basis) == g.dim
    checks["orthogonal"] = all(g.kappa(a, b) == 0 for a in gx for b in im_basis)
    checks["skew_adjoint"] = (g.pairing @ A + A.T @ g.pairing).is_zero()
    checks["direct_sum"] = span_rank(gx + im_basis) == g.dim
    return BreakingDecomposition(gx, im_basis, checks)


def _cohomology_table(L: DgLieAlgebra) -> dict[int, int]:
    return L.collapse().cohomology() if L.mode != "Z2" else L.cohomology()


def broken_theory_check(p: VacuumPoint, A: CdgAlgebra, twist: TwistPoint, eps_degree: int = -1) -> dict:
    """Compare cohomology at (x, twist) for g with that at (0, twist) for g_x.

    Both tables are reported Z/2-graded.  Construction errors are reported
    rather than raised, so a catalogue sweep sees every point.
    """
    out = {"algebra": p.g.name, "x": [str(c) for c in p.x], "A": A.name,
           "twist": [str(t) for t in twist.as_tuple()]}
    gx_basis = centralizer(p)
    gx = p.g.subalgebra(gx_basis, name=f"{p.g.name}_x")
    try:
        left = vacuum_twisted_algebra(A, p.g, p.vec, twist, eps_degree)
        right = vacuum_twisted_algebra(A, gx, {}, twist, eps_degree)
    except (ConstructionError, ValueError) as exc:
        out.update(constructed=False, error=str(exc), passed=False)
        return out
    lt, rt = _cohomology_table(left), _cohomology_table(right)
    out.update(constructed=True, ambient=lt, broken=rt, dim_centralizer=len(gx_basis), passed=lt == rt)
    return out


# ---------------------------------------------------------------------------
# invariants


def char_poly_coefficients(M: RationalMatrix) -> tuple[Fraction, ...]:
    """(e_1, ..., e_n) with det(tI - M) = t^n - e_1 t^{n-1} + e_2 t^{n-2} - ...

    Faddeev–LeVerrier, exact over Q.
    """
    n = M.nrows
    I = RationalMatrix.identity(n)
    Mk = RationalMatrix.zeros(n, n)
    coeffs = [Fraction(1)]  # c_0 of t^n + c_1 t^{n-1} + ...
    for k in range(1, n + 1):
        Mk = M @ (Mk + I.scale(coeffs[-1]))
        coeffs.append(-Mk.trace() / k)
    return tuple(coeffs[k] * (-1) ** k for k in range(1, n + 1))


def coarse_moduli_map(p: VacuumPoint) -> tuple[Fraction, ...]:
    """Characteristic-polynomial invariants of x in the defining representation."""
    if p.g.defining_rep is None:
        raise ValueError(f"{p.g.name} has no defining representation mapping")
    return char_poly_coefficients(p.matrix())


def point_from_matrix(g: DgLieAlgebra, M: Sequence[Sequence[object]] | RationalMatrix) -> VacuumPoint:
    """Coordinates of a matrix in g's defining representation."""
    if g.defining_rep is None:
        raise ValueError(f"{g.name} has no defining representation")
    M = M if isinstance(M, RationalMatrix) else RationalMatrix.from_rows(M)
    n = M.nrows
    B = RationalMatrix.from_columns(n * n, [[r[i, j] for i in range(n) for j in range(n)] for r in g.defining_rep])
    x = solve(B, [M[i, j] for i in range(n) for j in range(n)])
    if x is None:
        raise ValueError(f"matrix is not in {g.name}")
    return VacuumPoint(g, x)


def conjugate(p: VacuumPoint, S: Sequence[Sequence[object]] | RationalMatrix) -> VacuumPoint:
    """The point S x S^{-1}."""
    S = S if isinstance(S, RationalMatrix) else RationalMatrix.from_rows(S)
    n = S.nrows
    cols = [solve(S, {j: 1}) for j in range(n)]
    if any(c is None for c in cols):
        raise ValueError("conjugating matrix is singular")
    Sinv = RationalMatrix.from_columns(n, cols)
    return point_from_matrix(p.g, S @ p.matrix() @ Sinv)


def _diag(*d):
    n = len(d)
    return [[d[i] if i == j else 0 for j in range(n)] for i in range(n)]


def _jordan(n, upto=None):
    upto = n - 1 if upto is None else upto
    return [[1 if j == i + 1 and i < upto else 0 for j in range(n)] for i in range(n)]


# (algebra, label, kind, matrix)
VACUUM_CATALOGUE = (
    ("gl2", "regular-semisimple", "regular semisimple", _diag(1, 2)),
    ("gl2", "nilpotent", "nilpotent", _jordan(2)),
    ("gl2", "central", "non-regular semisimple", _diag(1, 1)),
    ("gl3", "regular-semisimple", "regular semisimple", _diag(1, 2, 3)),
    ("gl3", "subregular-semisimple", "non-regular semisimple", _diag(1, 1, 2)),
    ("gl3", "regular-nilpotent", "nilpotent", _jordan(3)),
    ("gl3", "minimal-nilpotent", "nilpotent", _jordan(3, 1)),
    ("sl3", "regular-semisimple", "regular semisimple", _diag(1, 0, -1)),
    ("sl3", "subregular-semisimple", "non-regular semisimple", _diag(1, 1, -2)),
    ("sl3", "regular-nilpotent", "nilpotent", _jordan(3)),
)


def catalogue_point(algebra: str, label: str) -> tuple[VacuumPoint, str]:
    for alg, lab, kind, M in VACUUM_CATALOGUE:
        if alg == algebra and lab == label:
            return point_from_matrix(preset(alg), M), kind
    raise KeyError(f"no catalogued vacuum {algebra}/{label}")
