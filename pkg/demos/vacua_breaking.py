"""Walk the vacuum catalogue: centralizers, the breaking split, and the broken-theory comparison."""
from bvtwist.dg_lie import TwistPoint, point_cdga
from bvtwist.vacua import (VACUUM_CATALOGUE, breaking_decomposition, broken_theory_check, catalogue_point,
                           coarse_moduli_map, conjugate)

print(f"{'vacuum':<28}{'dim g_x':>8}{'rank ad':>8}  direct sum  (0,0,0) (1,1,0) (1,1,1)")
for alg, label, kind, _ in VACUUM_CATALOGUE:
    p, _ = catalogue_point(alg, label)
    bd = breaking_decomposition(p)
    row = []
    for tw in [(0, 0, 0), (1, 1, 0), (1, 1, 1)]:
        rep = broken_theory_check(p, point_cdga(), TwistPoint(*tw))
        row.append("ok" if rep["passed"] else ("n/a" if not rep["constructed"] else "DIFF"))
    print(f"{alg + '/' + label:<28}{bd.dims[0]:>8}{bd.dims[1]:>8}  {str(bd.checks['direct_sum']):<11} "
          + "  ".join(f"{r:>6}" for r in row))

# nilpotent x: u ≠ 0 is refused because g_x and im ad_x overlap
p, _ = catalogue_point("gl3", "regular-nilpotent")
print(broken_theory_check(p, point_cdga(), TwistPoint(1, 1, 1))["error"])

# conjugation moves the point but not its characteristic polynomial
p, _ = catalogue_point("gl3", "subregular-semisimple")
q = conjugate(p, [[1, 2, 0], [0, 1, 1], [1, 0, 1]])
print("coarse image:", [str(c) for c in coarse_moduli_map(p)], "->", [str(c) for c in coarse_moduli_map(q)])
