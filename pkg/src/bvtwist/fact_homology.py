"""Determinant-line degrees, observable dimension tables and compactification algebras.

Manifolds enter only through their cohomology, read from a JSON catalogue.
The packaged catalogue can be replaced by pointing ``BVTWIST_CATALOGUE`` at a
directory holding a ``manifolds.json`` of the same shape.
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Mapping

from .ce_complex import ModuleSpec, build_ce
from .dg_lie import CdgAlgebra, DgLieAlgebra, cohomology_cdga, tensor_with_cdga
from .exactlinalg import RationalMatrix, rank
from .graded_core import free_cga_table
from .weyl_dot import DOTAlgebra, WeylAlgebra

__all__ = ["ManifoldData", "DetLineResult", "load_catalogue", "manifold", "det_line_degree",
           "det_line_at_vacuum", "shift_coefficient", "classical_observable_dims", "compactification_algebra",
           "manifold_cdga", "CATALOGUE_ENV"]

CATALOGUE_ENV = "BVTWIST_CATALOGUE"


@dataclass(frozen=True)
class ManifoldData:
    name: str
    dim: int
    flavor: str  # "deRham" | "Dolbeault"
    betti: tuple[int, ...]
    chi: int
    oriented: bool = True
    closed: bool = True
    admissible: bool = False
    hodge: tuple[tuple[int, ...], ...] | None = None
    pairing: tuple[tuple[int, ...], ...] | None = None
    cdga: tuple[str, ...] | None = None

    def __post_init__(self):
        if self.flavor not in ("deRham", "Dolbeault"):
            raise ValueError(f"{self.name}: unknown flavor {self.flavor!r}")
        if len(self.betti) != self.dim + 1:
            raise ValueError(f"{self.name}: need {self.dim + 1} graded dims, got {len(self.betti)}")
        alt = sum((-1) ** k * b for k, b in enumerate(self.betti))
        if alt != self.chi:
            raise ValueError(f"{self.name}: Euler characteristic {self.chi} != alternating sum {alt}")
        if self.hodge is not None:
            collapsed = [0] * (self.dim + 1)
            for p, row in enumerate(self.hodge):
                for q, h in enumerate(row):
                    if p + q > self.dim:
                        if h:
                            raise ValueError(f"{self.name}: Hodge number h^{p},{q} lies above dimension {self.dim}")
                        continue
                    collapsed[p + q] += h
            if tuple(collapsed) != tuple(self.betti):
                raise ValueError(f"{self.name}: Hodge table collapses to {collapsed}, not {list(self.betti)}")
        if self.pairing is not None:
            self._check_pairing()

    def _check_pairing(self) -> None:
        n = sum(self.betti)
        P = RationalMatrix.from_rows(self.pairing, ncols=n)
        if P.shape != (n, n) or rank(P) != n:
            raise ValueError(f"{self.name}: pairing is not a nondegenerate {n}x{n} matrix")
        deg = [k for k, b in enumerate(self.betti) for _ in range(b)]
        for i, j, _ in P.entries():
            if deg[i] + deg[j] != self.dim:
                raise ValueError(f"{self.name}: pairing couples degrees {deg[i]} and {deg[j]}")

    @classmethod
    def from_dict(cls, d: Mapping) -> "ManifoldData":
        def tup2(x):
            return None if x is None else tuple(tuple(r) for r in x)

        return cls(name=d["name"], dim=int(d["dim"]), flavor=d.get("flavor", "deRham"),
                   betti=tuple(int(b) for b in d["betti"]), chi=int(d["chi"]),
                   oriented=bool(d.get("oriented", True)), closed=bool(d.get("closed", True)),
                   admissible=bool(d.get("admissible", False)), hodge=tup2(d.get("hodge")),
                   pairing=tup2(d.get("pairing")), cdga=tuple(d["cdga"]) if d.get("cdga") else None)

    def as_dict(self) -> dict:
        out = {"name": self.name, "dim": self.dim, "flavor": self.flavor, "betti": list(self.betti),
               "chi": self.chi, "oriented": self.oriented}
        if self.hodge is not None:
            out["hodge"] = [list(r) for r in self.hodge]
        return out

    @property
    def holomorphic_chi(self) -> int | None:
        """Σ_q (-1)^q h^{0,q}, when a Hodge table is present."""
        if self.hodge is None:
            return None
        return sum((-1) ** q * h for q, h in enumerate(self.hodge[0]))


def load_catalogue(path: str | os.PathLike | None = None) -> dict[str, ManifoldData]:
    """Packaged catalogue, or ``manifolds.json`` under ``path`` / ``$BVTWIST_CATALOGUE``."""
    path = path or os.environ.get(CATALOGUE_ENV)
    if path:
        p = Path(path)
        text = (p / "manifolds.json" if p.is_dir() else p).read_text()
    else:
        text = resources.files("bvtwist").joinpath("data/manifolds.json").read_text()
    entries = json.loads(text)["manifolds"]
    return {e["name"]: ManifoldData.from_dict(e) for e in entries}


def manifold(name: str, catalogue: Mapping[str, ManifoldData] | None = None) -> ManifoldData:
    cat = catalogue if catalogue is not None else load_catalogue()
    if name not in cat:
        raise KeyError(f"unknown manifold {name!r}; catalogue: {', '.join(sorted(cat))}")
    return cat[name]


# ---------------------------------------------------------------------------
# determinant lines


def shift_coefficient(k: int) -> int:
    """c_k = k for odd k and 1 - k for even k."""
    return k if k % 2 else 1 - k


@dataclass
class DetLineResult:
    manifold: str
    algebra: str
    d_M: int
    total_rank: int
    euler: int
    per_degree: dict[int, int]
    contributions: dict[int, int]
    notes: list[str] = field(default_factory=list)
    holomorphic_parity: int | None = None

    @property
    def parity(self) -> int:
        return self.d_M % 2

    @property
    def parity_ok(self) -> bool:
        return self.parity == self.euler % 2

    @property
    def parities_disagree(self) -> bool:
        return self.holomorphic_parity is not None and self.holomorphic_parity != self.euler % 2

    def as_dict(self) -> dict:
        out = {"manifold": self.manifold, "algebra": self.algebra, "d_M": self.d_M, "parity": self.parity,
               "euler_characteristic": self.euler, "parity_ok": self.parity_ok, "total_rank": self.total_rank,
               "per_degree": {str(k): v for k, v in sorted(self.per_degree.items())},
               "contributions": {str(k): v for k, v in sorted(self.contributions.items())}, "notes": self.notes}
        if self.holomorphic_parity is not None:
            out["holomorphic_euler_parity"] = self.holomorphic_parity
            out["parities_disagree"] = self.parities_disagree
        return out


def _algebra_cohomology(g: DgLieAlgebra) -> dict[int, int]:
    if g.mode == "Z2":
        raise ValueError(f"{g.name} is only Z/2-graded; the shift needs an integer grading")
    if g.differential.is_zero():
        out: dict[int, int] = {}
        for d in g.degrees:
            out[d] = out.get(d, 0) + 1
        return out
    return {k: v for k, v in g.cohomology().items() if v}


def det_line_degree(M: ManifoldData, g: DgLieAlgebra) -> DetLineResult:
    """Degree of the determinant line of H•(M) ⊗ g."""
    if not M.closed:
        raise ValueError(f"{M.name} is not closed")
    if M.dim != 4:
        raise ValueError(f"{M.name} has dimension {M.dim}; closed 4-manifolds only")
    if M.flavor == "deRham" and not M.oriented:
        raise ValueError(f"{M.name} is not oriented")
    if M.flavor == "Dolbeault" and not M.admissible:
        raise ValueError(f"{M.name} is not flagged as an admissible complex surface")
    hg = _algebra_cohomology(g)
    per: dict[int, int] = {}
    for k, b in enumerate(M.betti):
        for j, n in hg.items():
            if b * n:
                per[k + j] = per.get(k + j, 0) + b * n
    contributions = {k: shift_coefficient(k) * n for k, n in per.items()}
    euler = sum((-1) ** k * n for k, n in per.items())
    res = DetLineResult(M.name, g.name, sum(contributions.values()), sum(per.values()), euler, per, contributions)
    if M.flavor == "Dolbeault":
        hol = M.holomorphic_chi * sum((-1) ** j * n for j, n in hg.items())
        res.holomorphic_parity = hol % 2
        res.notes.append("Dolbeault entry: parity compared with the topological Euler characteristic; "
                         "the holomorphic one is reported alongside")
    return res


def det_line_at_vacuum(M: ManifoldData, point) -> DetLineResult:
    """det_line_degree for the centralizer g_x of a vacuum point."""
    from .vacua import centralizer

    gx = point.g.subalgebra(centralizer(point), name=f"{point.g.name}_x")
    return det_line_degree(M, gx)


# ---------------------------------------------------------------------------
# observables


def classical_observable_dims(M: ManifoldData, g: DgLieAlgebra, degree_window: tuple[int, int] | None = None,
                              weight_cap: int = 3) -> dict:
    """Dims of Sym of the dual of H•(M) ⊗ g[1] ⊕ H•(M) ⊗ g*[2], by (weight, degree).

    Only the graded dims of M and g enter.
    """
    hg = _algebra_cohomology(g)
    field_degrees: list[int] = []
    for k, b in enumerate(M.betti):
        for j, n in hg.items():
            field_degrees += [k + j - 1] * (b * n)  # H ⊗ g[1]
            field_degrees += [k - j - 2] * (b * n)  # H ⊗ g*[2]
    coordinate_degrees = [-d for d in field_degrees]
    table = free_cga_table(coordinate_degrees, weight_cap)
    if degree_window is not None:
        lo, hi = degree_window
        table = {k: v for k, v in table.items() if lo <= k[1] <= hi}
    label = "exact" if g.is_abelian() and g.differential.is_zero() else "E1 page of augmentation filtration"
    return {"manifold": M.name, "algebra": g.name, "field_degrees": sorted(field_degrees),
            "generator_degrees": sorted(coordinate_degrees), "weight_cap": weight_cap,
            "degree_window": list(degree_window) if degree_window else None, "label": label,
            "table": dict(sorted(table.items()))}


# ---------------------------------------------------------------------------
# compactification along N × R


def manifold_cdga(M: ManifoldData) -> CdgAlgebra:
    if not M.cdga:
        raise ValueError(f"{M.name}: no cohomology ring recipe in the catalogue")
    A = cohomology_cdga(M.cdga[0])
    for part in M.cdga[1:]:
        A = A.tensor(cohomology_cdga(part))
    A.name = M.name
    return A


def compactification_algebra(N: ManifoldData, g: DgLieAlgebra, cap: int = 4, first_page: bool = True) -> DOTAlgebra:
    """Algebra on H•(N)[1] ⊗ g and its dual, for a closed oriented 3-manifold N.

    Abelian g gives the Weyl algebra with its full product.  Otherwise the
    result is the PBW skeleton of differential operators on B(g ⊗ H•(N)),
    with the CE differential of the first page attached when requested.
    """
    if N.dim != 3:
        raise ValueError(f"{N.name} has dimension {N.dim}; expected a closed 3-manifold")
    if not (N.closed and N.oriented):
        raise ValueError(f"{N.name} must be closed and oriented")
    abelian = g.is_abelian() and g.differential.is_zero()
    if abelian:
        x_degrees = []
        labels = []
        for k, b in enumerate(N.betti):
            for c in range(b):
                for j, d in enumerate(g.degrees):
                    x_degrees.append(1 - k - d)
                    labels.append(f"x[H{k}.{c}⊗{g.labels[j]}]")
        W = WeylAlgebra(x_degrees, cap, labels)
        return DOTAlgebra(f"Weyl({N.name}, {g.name})", tuple(x_degrees), tuple(-d for d in x_degrees), cap,
                          W.dims(), W)
    h = tensor_with_cdga(manifold_cdga(N), g)
    base = tuple(1 - d for d in h.degrees)
    W = WeylAlgebra(base, cap)
    D = DOTAlgebra(f"D(B({g.name}⊗H({N.name})))", base, tuple(-d for d in base), cap, W.dims())
    D.notes.append("nonabelian: dimension skeleton only, product not constructed")
    if first_page:
        D.first_page = _first_page(h, cap)
    return D


def _first_page(h: DgLieAlgebra, cap: int) -> dict:
    """CE cochains of h with coefficients in Sym(h[1]) (vector fields on B h)."""
    vf = ModuleSpec("vector fields", tuple(d - 1 for d in h.degrees), tuple(h.ad_basis(i) for i in range(h.dim)),
                    None, tuple(range(cap + 1)))
    window = (-cap, cap)
    c = build_ce(h, vf, max_weight=cap, degree_window=window)
    rep = c.square_report()
    return {"window": list(window), "max_weight": cap, "square_zero": rep,
            "block_dims": {f"{k[0]},{k[1]},{k[2]}": v for k, v in c.block_dims().items()}}
