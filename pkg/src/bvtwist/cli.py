"""Command-line front end.

Every command prints one JSON report (or a plain table with ``--format
table``).  Exit status: 0 success, 1 invalid input, 2 a check inside the run
failed.
"""
from __future__ import annotations

import argparse
import copy
import json
import sys
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from importlib import resources
from typing import Sequence

import jsonschema

from . import __version__
from .anomaly import InteractionGraph, admissible_orientations, anomaly_vanishing_report, classify_graph
from .ce_complex import ModuleSpec, build_ce, ce_cohomology
from .dg_lie import (CDGA_PRESETS, PRESETS, ConstructionError, TwistPoint, cdga_preset, check_axioms,
                     epsilon_extend, hodge_family, preset, tensor_with_cdga)
from .exactlinalg import ComplexError
from .fact_homology import (classical_observable_dims, compactification_algebra, det_line_at_vacuum,
                            det_line_degree, load_catalogue, manifold)
from .heat_kernel import propagator_eval
from .spectral import FiltrationError, check_convergence, pages, random_filtered_complex
from .vacua import (VACUUM_CATALOGUE, VacuumPoint, breaking_decomposition, broken_theory_check, catalogue_point,
                    coarse_moduli_map)
from .weyl_dot import NORMAL_ORDER, dot_check

COMMANDS = ("check-axioms", "cohomology", "anomaly", "vacua", "fact-hom", "compactify", "propagator", "spectral",
            "catalogue")

CONVENTIONS = {
    "eps_degree": -1,
    "normal_order": NORMAL_ORDER,
    "sign_convention": "Koszul; [a⊗x, b⊗y] = (-1)^{|x||b|} ab⊗[x, y]",
    "ce_differential": "Qξ^k = -D ξ - ½ σ_ij c^k_ij ξ^i ξ^j",
}


class UsageError(ValueError):
    pass


@dataclass
class RunConfig:
    command: str
    algebra: str | None = None
    manifold: str | None = None
    cdga: str | None = None
    twist: list[str] = field(default_factory=lambda: ["0", "0", "0"])
    vacuum: list[str] | None = None
    vacuum_label: str | None = None
    caps: dict = field(default_factory=dict)
    options: dict = field(default_factory=dict)
    format: str = "json"
    seed: int = 0
    catalogue_path: str | None = None

    def as_dict(self) -> dict:
        return {k: v for k, v in asdict(self).items() if v is not None}


def _schema(name: str) -> dict:
    return json.loads(resources.files("bvtwist").joinpath(f"schemas/{name}").read_text())


def validate_config(cfg: RunConfig) -> None:
    try:
        jsonschema.validate(cfg.as_dict(), _schema("run_config.schema.json"))
    except jsonschema.ValidationError as exc:
        raise UsageError(f"invalid configuration: {exc.message}") from exc
    for v in cfg.twist + (cfg.vacuum or []):
        try:
            Fraction(v)
        except (ValueError, ZeroDivisionError) as exc:
            raise UsageError(f"{v!r} is not a rational number") from exc


def _jsonable(x):
    if isinstance(x, Fraction):
        return str(x) if x.denominator != 1 else x.numerator
    if isinstance(x, complex):
        return {"re": x.real, "im": x.imag}
    if isinstance(x, dict):
        return {(",".join(map(str, k)) if isinstance(k, tuple) else str(k)): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple, set)):
        return [_jsonable(v) for v in x]
    if hasattr(x, "item"):  # numpy scalars
        return x.item()
    return x


# ---------------------------------------------------------------------------
# catalogue lookups


def _algebra(name: str | None):
    if not name:
        raise UsageError("--algebra is required; catalogue: " + ", ".join(PRESETS))
    try:
        return preset(name)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"unknown algebra {name!r}; catalogue: {', '.join(PRESETS)}, aff1") from exc


def _manifold(name: str | None, path: str | None):
    cat = load_catalogue(path)
    if not name or name not in cat:
        raise UsageError(f"unknown manifold {name!r}; catalogue: {', '.join(sorted(cat))}")
    return manifold(name, cat)


def _cdga(name: str | None):
    if name is None:
        return None
    try:
        return cdga_preset(name)
    except (KeyError, ValueError) as exc:
        raise UsageError(f"unknown cdga {name!r}; catalogue: {', '.join(CDGA_PRESETS)}") from exc


def _vacuum(cfg: RunConfig, g):
    if cfg.vacuum_label:
        try:
            p, kind = catalogue_point(cfg.algebra, cfg.vacuum_label)
        except KeyError as exc:
            labels = sorted({f"{a}/{l}" for a, l, _, _ in VACUUM_CATALOGUE})
            raise UsageError(f"{exc.args[0]}; catalogue: {', '.join(labels)}") from exc
        return p, kind
    if cfg.vacuum is None:
        return None, None
    try:
        return VacuumPoint(g, [Fraction(c) for c in cfg.vacuum]), "user"
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# ---------------------------------------------------------------------------
# commands


def cmd_catalogue(cfg: RunConfig) -> tuple[dict, bool]:
    cat = load_catalogue(cfg.catalogue_path)
    return {"algebras": list(PRESETS[:-1]) + ["abelian:1", "abelian:2", "abelian:3", "aff1"],
            "cdgas": list(CDGA_PRESETS),
            "manifolds": [m.as_dict() for m in cat.values()],
            "vacua": [{"algebra": a, "label": l, "kind": k} for a, l, k, _ in VACUUM_CATALOGUE]}, True


def cmd_check_axioms(cfg: RunConfig) -> tuple[dict, bool]:
    L = _algebra(cfg.algebra)
    A = _cdga(cfg.cdga)
    if A is not None:
        L = tensor_with_cdga(A, L)
    if cfg.options.get("epsilon"):
        L = epsilon_extend(L, int(cfg.options.get("eps_degree", -1)))
    if cfg.options.get("hodge") is not None:
        L = hodge_family(L, Fraction(cfg.options["hodge"]))
    rep = check_axioms(L)
    return {"algebra": L.name, "dim": L.dim, "degrees": list(L.degrees), "mode": L.mode, **rep.as_dict()}, rep.passed


def cmd_cohomology(cfg: RunConfig) -> tuple[dict, bool]:
    L = _algebra(cfg.algebra)
    A = _cdga(cfg.cdga)
    if A is not None:
        L = tensor_with_cdga(A, L)
    coeff = cfg.options.get("coefficients", "trivial")
    power = int(cfg.options.get("sym_power", 1))
    module = {"trivial": ModuleSpec.trivial(), "adjoint": ModuleSpec.adjoint(L, (power,)),
              "coadjoint": ModuleSpec.coadjoint(L, (power,))}[coeff]
    window = cfg.caps.get("window")
    c = build_ce(L, module, cfg.caps.get("max_weight"), tuple(window) if window else None)
    res = ce_cohomology(c)
    cfg.caps.update(res.caps)
    return {"algebra": L.name, "coefficients": coeff, "dims": res.as_list(),
            "by_degree": res.dims, "flags": res.flags, "square_zero": c.square_report()}, True


def cmd_anomaly(cfg: RunConfig) -> tuple[dict, bool]:
    Lp = _algebra(cfg.algebra)
    if cfg.options.get("epsilon"):
        Lp = epsilon_extend(Lp)
    rep = anomaly_vanishing_report(Lp, int(cfg.options.get("delta_degree", 1)), int(cfg.caps.get("v_max", 5)),
                                   int(cfg.options.get("samples", 20)), cfg.seed)
    d = rep.as_dict()
    if cfg.options.get("graph_path"):
        d["graphs"] = _graph_rows(cfg.options["graph_path"])
    if not cfg.options.get("verbose"):
        d["rows"] = [r for r in d["rows"] if r["sample"] == 0]
        d["rows_shown"] = "sample 0 only; all samples enter all_zero"
    return d, rep.passed


def _graph_rows(path: str) -> list[dict]:
    """Classify each graph of an edge-list document; undirected ones get an orientation count."""
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
        jsonschema.validate(doc, _schema("graph.schema.json"))
    except (OSError, json.JSONDecodeError, jsonschema.ValidationError) as exc:
        raise UsageError(f"bad graph file {path}: {getattr(exc, 'message', exc)}") from exc
    rows = []
    for i, gd in enumerate(doc["graphs"]):
        # JSON object keys are strings; match them to integer vertex names
        legs = {next((v for v in gd["vertices"] if str(v) == k), k): n for k, n in gd.get("legs", {}).items()}
        row = {"name": gd.get("name", f"graph{i}")}
        if gd.get("directed", True):
            c = classify_graph(InteractionGraph(tuple(gd["vertices"]), tuple(map(tuple, gd["edges"])), legs))
            row.update(kind=c.kind, loop_length=c.loop_length, reason=c.reason)
        else:
            row["admissible_orientations"] = admissible_orientations(gd["vertices"], gd["edges"], legs)
        rows.append(row)
    return rows


def cmd_vacua(cfg: RunConfig) -> tuple[dict, bool]:
    g = _algebra(cfg.algebra)
    p, kind = _vacuum(cfg, g)
    if p is None:
        raise UsageError("give --vacuum COORDS or --vacuum-label LABEL")
    A = _cdga(cfg.cdga or "point")
    t = TwistPoint(*[Fraction(c) for c in cfg.twist])
    dec = breaking_decomposition(p)
    chk = broken_theory_check(p, A, t)
    out = {"algebra": g.name, "kind": kind, "x": [str(c) for c in p.x], "decomposition": dec.as_dict(),
           "broken_theory": chk}
    if g.defining_rep is not None:
        out["coarse_moduli"] = [str(c) for c in coarse_moduli_map(p)]
    return out, dec.passed and chk["passed"]


def cmd_fact_hom(cfg: RunConfig) -> tuple[dict, bool]:
    M = _manifold(cfg.manifold, cfg.catalogue_path)
    g = _algebra(cfg.algebra)
    try:
        res = det_line_degree(M, g)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    out = res.as_dict()
    wcap = int(cfg.caps.get("weight_cap", 2))
    out["observables"] = classical_observable_dims(M, g, weight_cap=wcap)
    ok = res.parity_ok
    p, _ = _vacuum(cfg, g)
    if p is not None:
        at = det_line_at_vacuum(M, p)
        out["at_vacuum"] = at.as_dict()
        ok = ok and at.parity_ok
    return out, ok


def cmd_compactify(cfg: RunConfig) -> tuple[dict, bool]:
    N = _manifold(cfg.manifold, cfg.catalogue_path)
    g = _algebra(cfg.algebra)
    cap = int(cfg.caps.get("level_cap", 3))
    try:
        D = compactification_algebra(N, g, cap)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    rep = dot_check(D)
    out = {"name": D.name, "base_degrees": list(D.base_degrees), "fiber_degrees": list(D.fiber_degrees),
           "cap": cap, "gr_fib": D.gr_fib(), "gr_antidiag": D.gr_antidiag(),
           "dot_check": {"passed": rep.passed, "blocks": len(rep.rows), "failures": rep.failures()},
           "full_product": D.weyl is not None, "notes": D.notes}
    if D.first_page is not None:
        out["first_page"] = D.first_page
    return out, rep.passed


def cmd_propagator(cfg: RunConfig) -> tuple[dict, bool]:
    o = cfg.options
    try:
        z = [complex(s) for s in o["z"]]
        w = [complex(s) for s in o["w"]]
    except (KeyError, ValueError) as exc:
        raise UsageError("--z and --w need complex coordinates like 0.5+1j") from exc
    try:
        P = propagator_eval(int(o.get("dim", len(z))), float(o.get("lambda", 1.0)), z, w)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    return P.as_dict(), True


def cmd_spectral(cfg: RunConfig) -> tuple[dict, bool]:
    if cfg.algebra:
        from .ce_complex import augmentation_filtration

        L = _algebra(cfg.algebra)
        f = augmentation_filtration(build_ce(L, max_weight=cfg.caps.get("max_weight")))
        source = f"augmentation filtration of CE({L.name})"
    else:
        f = random_filtered_complex(cfg.seed, int(cfg.caps.get("max_dim", 40)))
        source = f"random filtered complex, seed {cfg.seed}"
    sp = pages(f)
    ok = check_convergence(f, sp) and sp.consistent()
    return {"source": source, **sp.as_dict(), "E_infinity_equals_gr_H": ok}, ok


HANDLERS = {
    "catalogue": cmd_catalogue, "check-axioms": cmd_check_axioms, "cohomology": cmd_cohomology,
    "anomaly": cmd_anomaly, "vacua": cmd_vacua, "fact-hom": cmd_fact_hom, "compactify": cmd_compactify,
    "propagator": cmd_propagator, "spectral": cmd_spectral,
}


def run(cfg: RunConfig) -> tuple[int, dict]:
    """Execute one configuration; returns (exit code, report)."""
    report = {"command": cfg.command, "version": __version__}
    snapshot = copy.deepcopy(cfg.as_dict())
    try:
        validate_config(cfg)
        result, ok = HANDLERS[cfg.command](cfg)
    except UsageError as exc:
        report.update(status="invalid", error=str(exc), config=snapshot)
        return 1, report
    except (ComplexError, ConstructionError, FiltrationError) as exc:
        report.update(status="check-failed", error=str(exc), config=snapshot, caps=cfg.caps,
                      conventions=CONVENTIONS)
        return 2, report
    except (ValueError, KeyError) as exc:
        report.update(status="invalid", error=str(exc), config=snapshot)
        return 1, report
    report.update(status="ok" if ok else "check-failed", config=snapshot, caps=cfg.caps,
                  conventions=CONVENTIONS, seed=cfg.seed, result=result)
    return (0 if ok else 2), report


def render(report: dict, fmt: str) -> str:
    doc = _jsonable(report)
    if fmt == "json":
        return json.dumps(doc, sort_keys=True, indent=2, ensure_ascii=False)
    lines = []

    def walk(prefix, v):
        if isinstance(v, dict):
            for k in sorted(v):
                walk(f"{prefix}.{k}" if prefix else k, v[k])
        elif isinstance(v, list) and v and isinstance(v[0], (dict, list)):
            for i, x in enumerate(v):
                walk(f"{prefix}[{i}]", x)
        else:
            lines.append(f"{prefix:<48} {v}")

    walk("", doc)
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# argument parsing


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="bvtwist", description="Exact checks for twisted gauge theory algebra.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, algebra=True):
        p.add_argument("--format", choices=("json", "table"), default="json")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--catalogue", dest="catalogue_path", help="manifold catalogue file or directory")
        if algebra:
            p.add_argument("--algebra")
        return p

    common(sub.add_parser("catalogue", help="list shipped algebras, cdgas, manifolds and vacua"), algebra=False)

    p = common(sub.add_parser("check-axioms", help="dg Lie axioms for a preset or construction"))
    p.add_argument("--cdga", help="tensor with this cdga first")
    p.add_argument("--epsilon", action="store_true", help="adjoin an odd ε")
    p.add_argument("--eps-degree", type=int, default=-1)
    p.add_argument("--hodge", help="Hodge family parameter t")

    p = common(sub.add_parser("cohomology", help="Chevalley–Eilenberg cohomology"))
    p.add_argument("--cdga")
    p.add_argument("--coefficients", choices=("trivial", "adjoint", "coadjoint"), default="trivial")
    p.add_argument("--sym-power", type=int, default=1)
    p.add_argument("--max-weight", type=int)
    p.add_argument("--window", type=int, nargs=2, metavar=("LO", "HI"))

    p = common(sub.add_parser("anomaly", help="one-loop wheel weights on the doubled algebra"))
    p.add_argument("--delta-degree", type=int, default=1)
    p.add_argument("--vmax", type=int, default=5)
    p.add_argument("--samples", type=int, default=20)
    p.add_argument("--epsilon", action="store_true", help="use the algebra's ε-extension as L'")
    p.add_argument("--verbose", action="store_true")
    p.add_argument("--graph", dest="graph_path", help="JSON edge lists of interaction graphs to classify")

    p = common(sub.add_parser("vacua", help="symmetry breaking at a vacuum"))
    p.add_argument("--vacuum", nargs="+", metavar="COORD")
    p.add_argument("--vacuum-label")
    p.add_argument("--cdga", default="point")
    p.add_argument("--twist", nargs=3, default=["0", "0", "0"], metavar=("T1", "T2", "U"))

    p = common(sub.add_parser("fact-hom", help="determinant-line degree on a closed 4-manifold"))
    p.add_argument("--manifold")
    p.add_argument("--vacuum", nargs="+", metavar="COORD")
    p.add_argument("--vacuum-label")
    p.add_argument("--weight-cap", type=int, default=2)

    p = common(sub.add_parser("compactify", help="algebra on N × R for a closed 3-manifold N"))
    p.add_argument("--manifold")
    p.add_argument("--cap", type=int, default=3)

    p = common(sub.add_parser("propagator", help="heat-kernel propagator coefficients"), algebra=False)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=1.0)
    p.add_argument("--z", nargs="+", required=True)
    p.add_argument("--w", nargs="+", required=True)

    p = common(sub.add_parser("spectral", help="spectral sequence pages"))
    p.add_argument("--max-dim", type=int, default=40)
    p.add_argument("--max-weight", type=int)
    return ap


def config_from_args(a: argparse.Namespace) -> RunConfig:
    cfg = RunConfig(command=a.command, format=a.format, seed=a.seed, catalogue_path=a.catalogue_path,
                    algebra=getattr(a, "algebra", None), manifold=getattr(a, "manifold", None),
                    cdga=getattr(a, "cdga", None))
    if getattr(a, "twist", None):
        cfg.twist = list(a.twist)
    cfg.vacuum = getattr(a, "vacuum", None)
    cfg.vacuum_label = getattr(a, "vacuum_label", None)
    c, o = cfg.caps, cfg.options
    if a.command == "check-axioms":
        o.update(epsilon=a.epsilon, eps_degree=a.eps_degree, hodge=a.hodge)
    elif a.command == "cohomology":
        o.update(coefficients=a.coefficients, sym_power=a.sym_power)
        if a.max_weight is not None:
            c["max_weight"] = a.max_weight
        if a.window:
            c["window"] = list(a.window)
    elif a.command == "anomaly":
        c["v_max"] = a.vmax
        o.update(delta_degree=a.delta_degree, samples=a.samples, epsilon=a.epsilon, verbose=a.verbose)
        if a.graph_path:
            o["graph_path"] = a.graph_path
    elif a.command == "fact-hom":
        c["weight_cap"] = a.weight_cap
    elif a.command == "compactify":
        c["level_cap"] = a.cap
    elif a.command == "propagator":
        o.update(dim=a.dim, z=a.z, w=a.w)
        o["lambda"] = a.lam
    elif a.command == "spectral":
        c["max_dim"] = a.max_dim
        if a.max_weight is not None:
            c["max_weight"] = a.max_weight
    return cfg


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    code, report = run(cfg)
    print(render(report, cfg.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
