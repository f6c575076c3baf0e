"""How fast the cut-off propagator approaches the Cauchy kernel, and the by-parts identity on a grid."""
import math

import numpy as np

from bvtwist.heat_kernel import (QuadratureSpec, boundary_term, by_parts_vanishing, cauchy_kernel,
                                 gauge_condition_check, propagator_eval, radial_integral, radial_integral_closed)

z, w = 0.7 - 0.2j, -0.1 + 0.4j
r2 = abs(z - w) ** 2
exact = cauchy_kernel(z, w)

# relative deficit at Λ = s·r² is 1 - exp(-1/4s); it only dies off like 1/Λ
for s in [1e0, 1e2, 1e4, 1e6, 1e8, math.inf]:
    P = propagator_eval(1, s * r2, [z], [w])[()]
    print(f"Λ/r² = {s:<8g} rel err = {abs(P - exact) / abs(exact):.3e}  predicted = {-math.expm1(-1 / (4 * s)):.3e}")

# d = 2: quadrature versus the incomplete-gamma closed form over six decades of r
for rr in np.geomspace(1e-3, 1e1, 5):
    q, _ = radial_integral(2, rr ** 2, 1.0)
    print(f"d=2 r={rr:<7.3g} quad = {q:.10e}  closed = {radial_integral_closed(2, rr ** 2, 1.0):.10e}")

print("by parts:", by_parts_vanishing("w_gauss", "shifted_gauss")["residual"])
for n in (51, 101, 201, 401):
    v = by_parts_vanishing("shifted_gauss", "wbar", QuadratureSpec(grid=n), half_width=1.0)["value"]
    print(f"  truncated box, grid {n:>3}: {v.real:.10f}")
print("  boundary term:", boundary_term("shifted_gauss", "wbar", 1.0, points=20001).real)

print("gauge d=2:", {k: gauge_condition_check(2)[k] for k in ("symbolic_zero", "max_residual")})
