"""Regularized heat-kernel propagator on C^d and the vanishing identities it satisfies.

Floats live only here.  The propagator is a (0, d-1)-form in the odd
generators ``η_i = dz̄_i - dw̄_i``; the coefficient of the word omitting ``η_j``
is

    (-1)^{j} (z̄_j - w̄_j) / (4 (2πi)^d) ∫_0^Λ t^{-d-1} e^{-|z-w|^2/4t} dt      (j from 0)

times the algebraic tensor, which stays symbolic.  With this orientation the
d = 1, Λ → ∞ limit is the Cauchy kernel 1/(2πi(z-w)).
"""
from __future__ import annotations

import math
import random
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .graded_core import FormWord

__all__ = ["QuadratureSpec", "QuadratureError", "FormValue", "propagator_eval", "radial_integral",
           "radial_integral_closed", "cauchy_kernel", "TestFunction", "TEST_FUNCTIONS", "by_parts_vanishing", "boundary_term",
           "gauge_condition_check", "ALGEBRAIC_FACTOR"]

ALGEBRAIC_FACTOR = "c_E0"


class QuadratureError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuadratureSpec:
    """t-integral: adaptive Gauss–Kronrod in σ = r²/4t on [r²/4Λ, ∞).  Plane: tensor trapezoid grid."""

    epsabs: float = 1e-14
    epsrel: float = 1e-12
    limit: int = 200
    grid: int = 401
    half_width: float = 8.0
    tolerance: float = 1e-8

    def __post_init__(self):
        if self.tolerance <= 0 or self.epsabs < 0 or self.epsrel <= 0:
            raise ValueError("tolerances must be positive")
        if self.grid < 3:
            raise ValueError("grid needs at least 3 points per side")


@dataclass
class FormValue:
    """Complex coefficients on canonical words in the η's, times the symbolic algebraic factor."""

    d: int
    coefficients: dict[tuple[int, ...], complex]
    algebraic_factor: str = ALGEBRAIC_FACTOR
    errors: dict[tuple[int, ...], float] = field(default_factory=dict)

    def __post_init__(self):
        canon = {}
        for word, c in self.coefficients.items():
            w = FormWord(tuple(word)).canonical()
            if w.coefficient:
                canon[w.generators] = canon.get(w.generators, 0) + float(w.coefficient) * c
        self.coefficients = dict(sorted(canon.items()))

    def __getitem__(self, word) -> complex:
        return self.coefficients.get(tuple(word), 0j)

    def max_abs_diff(self, other: "FormValue") -> float:
        keys = set(self.coefficients) | set(other.coefficients)
        return max((abs(self[k] - other[k]) for k in keys), default=0.0)

    def as_dict(self) -> dict:
        return {"d": self.d, "generators": [f"dzbar{i + 1}-dwbar{i + 1}" for i in range(self.d)],
                "algebraic_factor": self.algebraic_factor,
                "terms": [{"word": list(w), "re": c.real, "im": c.imag} for w, c in self.coefficients.items()]}


def radial_integral(d: int, r2: float, Lambda: float, q: QuadratureSpec = QuadratureSpec()) -> tuple[float, float]:
    """∫_0^Λ t^{-d-1} e^{-r2/4t} dt.

    Substituting σ = r2/4t gives (4/r2)^d ∫_{r2/4Λ}^∞ σ^{d-1} e^{-σ} dσ, whose
    integrand has unit scale for every r2; quad runs on that.
    """
    if r2 <= 0:
        raise ValueError("the radial integral diverges at coincident points")
    lo = 0.0 if math.isinf(Lambda) else r2 / (4.0 * Lambda)
    with warnings.catch_warnings():
        warnings.simplefilter("error", integrate.IntegrationWarning)
        try:
            val, err = integrate.quad(lambda s: s ** (d - 1) * math.exp(-s), lo, math.inf,
                                      epsabs=q.epsabs, epsrel=q.epsrel, limit=q.limit)
        except integrate.IntegrationWarning as exc:
            raise QuadratureError(f"t-integral did not converge (d={d}, r²={r2}, Λ={Lambda}): {exc}") from exc
    if err > max(q.tolerance * abs(val), q.epsabs * 10):
        raise QuadratureError(f"t-integral error estimate {err:.3g} exceeds tolerance")
    scale = (4.0 / r2) ** d
    return val * scale, err * scale


def radial_integral_closed(d: int, r2: float, Lambda: float) -> float:
    """(4/r²)^d Γ(d, r²/4Λ), the same integral in closed form."""
    x = 0.0 if math.isinf(Lambda) else r2 / (4.0 * Lambda)
    return (4.0 / r2) ** d * special.gammaincc(d, x) * math.gamma(d)


def propagator_eval(d: int, Lambda: float, z: Sequence[complex], w: Sequence[complex],
                    q: QuadratureSpec = QuadratureSpec()) -> FormValue:
    if d < 1 or len(z) != d or len(w) != d:
        raise ValueError("z and w must be points of C^d with d ≥ 1")
    if not Lambda > 0:
        raise ValueError("Λ must be positive")
    u = [complex(a) - complex(b) for a, b in zip(z, w)]
    words = [tuple(i for i in range(d) if i != j) for j in range(d)]
    r2 = sum(abs(c) ** 2 for c in u)
    if r2 == 0:
        return FormValue(d, {wd: 0j for wd in words})
    I, err = radial_integral(d, r2, Lambda, q)
    pref = 1.0 / (4.0 * (2j * math.pi) ** d)
    coeffs, errs = {}, {}
    for j in range(d):
        c = (-1) ** j * u[j].conjugate() * pref
        coeffs[words[j]] = c * I
        errs[words[j]] = abs(c) * err
    return FormValue(d, coeffs, errors=errs)


def cauchy_kernel(z: complex, w: complex) -> complex:
    return 1.0 / (2j * math.pi * (complex(z) - complex(w)))


# ---------------------------------------------------------------------------
# integration by parts on the plane


@dataclass(frozen=True)
class TestFunction:
    """A function of w = x + iy with its ∂/∂w̄ derivative, both vectorized."""

    name: str
    f: Callable[[np.ndarray], np.ndarray]
    dbar: Callable[[np.ndarray], np.ndarray]
    decaying: bool = True


def _gauss(c: complex = 0):
    return lambda w: np.exp(-np.abs(w - c) ** 2)


TEST_FUNCTIONS: dict[str, TestFunction] = {
    "gauss": TestFunction("gauss", _gauss(), lambda w: -w * np.exp(-np.abs(w) ** 2)),
    "w_gauss": TestFunction("w_gauss", lambda w: w * np.exp(-np.abs(w) ** 2),
                            lambda w: -w * w * np.exp(-np.abs(w) ** 2)),
    "shifted_gauss": TestFunction("shifted_gauss", _gauss(1), lambda w: -(w - 1) * np.exp(-np.abs(w - 1) ** 2)),
    "wbar_gauss": TestFunction("wbar_gauss", lambda w: np.conj(w) * np.exp(-np.abs(w) ** 2),
                               lambda w: (1 - np.abs(w) ** 2) * np.exp(-np.abs(w) ** 2)),
    "one": TestFunction("one", lambda w: np.ones_like(w), lambda w: np.zeros_like(w), decaying=False),
    "wbar": TestFunction("wbar", lambda w: np.conj(w), lambda w: np.ones_like(w), decaying=False),
}


def _grid(q: QuadratureSpec, half_width: float | None = None):
    a = q.half_width if half_width is None else half_width
    xs = np.linspace(-a, a, q.grid)
    h = xs[1] - xs[0]
    wts = np.full(q.grid, h)
    wts[0] = wts[-1] = h / 2
    X, Y = np.meshgrid(xs, xs, indexing="ij")
    return X + 1j * Y, np.outer(wts, wts)


def by_parts_vanishing(f: TestFunction | str, g: TestFunction | str, q: QuadratureSpec = QuadratureSpec(),
                       half_width: float | None = None) -> dict:
    """∫ (∂_w̄ f) g + f (∂_w̄ g) dA over the box, with both pieces reported."""
    f = TEST_FUNCTIONS[f] if isinstance(f, str) else f
    g = TEST_FUNCTIONS[g] if isinstance(g, str) else g
    W, wts = _grid(q, half_width)
    first = complex(np.sum(wts * f.dbar(W) * g.f(W)))
    second = complex(np.sum(wts * f.f(W) * g.dbar(W)))
    total = first + second
    return {"f": f.name, "g": g.name, "first": first, "second": second, "residual": abs(total), "value": total,
            "grid": q.grid, "half_width": q.half_width if half_width is None else half_width,
            "decaying": f.decaying and g.decaying}


def boundary_term(f: TestFunction | str, g: TestFunction | str, half_width: float, points: int = 2001) -> complex:
    """Stokes side of ∫_box ∂_w̄(fg) dA, as edge integrals (Simpson)."""
    f = TEST_FUNCTIONS[f] if isinstance(f, str) else f
    g = TEST_FUNCTIONS[g] if isinstance(g, str) else g
    a = half_width
    s = np.linspace(-a, a, points)

    def h(w):
        return f.f(w) * g.f(w)

    vertical = integrate.simpson(h(a + 1j * s) - h(-a + 1j * s), x=s)
    horizontal = integrate.simpson(h(s + 1j * a) - h(s - 1j * a), x=s)
    return complex(0.5 * (vertical + 1j * horizontal))


# ---------------------------------------------------------------------------
# gauge condition


def _symbolic_dbar_star(d: int) -> dict:
    """∂̄* of Σ_j (-1)^j g_j η_{ĵ}, with ∂_k g_j kept as the symmetric symbol S{j,k}.

    ∂̄* contracts η_k and differentiates by u_k.  Returns the surviving
    (word, symbol) -> integer coefficient table; it is empty when ∂̄* P = 0.
    """
    out: dict[tuple[tuple, tuple], int] = {}
    for j in range(d):
        word = FormWord(tuple(i for i in range(d) if i != j), (-1) ** j)
        for k in word.generators:
            pos = word.generators.index(k)
            sign = (-1) ** pos  # contraction passes η_k over the earlier factors
            rest = word.generators[:pos] + word.generators[pos + 1:]
            key = (rest, tuple(sorted((j, k))))
            out[key] = out.get(key, 0) - int(word.coefficient) * sign
    return {k: v for k, v in out.items() if v}


def _coefficient_field(d: int, Lambda: float, q: QuadratureSpec):
    """u ↦ the coefficient functions g_j(u) (without the algebraic factor)."""
    def g(u: np.ndarray) -> np.ndarray:
        r2 = float(np.sum(np.abs(u) ** 2))
        I, _ = radial_integral(d, r2, Lambda, q)
        pref = 1.0 / (4.0 * (2j * math.pi) ** d)
        return np.array([(-1) ** j * np.conj(u[j]) * pref * I for j in range(d)])
    return g


def gauge_condition_check(d: int, samples: int = 10, h: float = 1e-4, Lambda: float = 1.0, seed: int = 0,
                          q: QuadratureSpec = QuadratureSpec(), tolerance: float = 1e-5) -> dict:
    """Exact symbolic ∂̄* P = 0 plus a central-difference check at seeded points."""
    if d < 1:
        raise ValueError("d ≥ 1")
    if d == 1:
        return {"d": 1, "symbolic_zero": True, "symbolic_terms": {}, "max_residual": 0.0, "samples": 0,
                "passed": True, "note": "P is a 0-form; ∂̄* vanishes on it identically"}
    table = _symbolic_dbar_star(d)
    g = _coefficient_field(d, Lambda, q)
    rng = random.Random(seed)
    worst = 0.0
    for _ in range(samples):
        z = np.array([complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(d)])
        w = np.array([complex(rng.uniform(-1, 1), rng.uniform(-1, 1)) for _ in range(d)])
        u = z - w

        def dk(k, j):
            # holomorphic derivative ∂/∂u_k = (∂_x - i ∂_y)/2 of g_j, central differences
            e = np.zeros(d, dtype=complex)
            e[k] = h
            gx = (g(u + e)[j] - g(u - e)[j]) / (2 * h)
            gy = (g(u + 1j * e)[j] - g(u - 1j * e)[j]) / (2 * h)
            return 0.5 * (gx - 1j * gy)

        # same contraction pattern as the symbolic table, with numeric derivatives
        res: dict[tuple, complex] = {}
        for j in range(d):
            word = tuple(i for i in range(d) if i != j)
            for pos, k in enumerate(word):
                rest = word[:pos] + word[pos + 1:]
                # g_j already carries (-1)^j, so only the contraction sign enters here
                res[rest] = res.get(rest, 0) - (-1) ** pos * dk(k, j)
        worst = max(worst, max(abs(v) for v in res.values()))
    return {"d": d, "symbolic_zero": not table, "symbolic_terms": {str(k): v for k, v in table.items()},
            "max_residual": float(worst), "samples": samples, "step": h, "Lambda": Lambda,
            "passed": bool(not table and worst < tolerance)}
