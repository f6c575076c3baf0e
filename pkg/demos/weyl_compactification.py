"""Weyl algebras from compactifying along a 3-manifold, and the DOT dimension checks."""
from bvtwist.dg_lie import abelian, preset
from bvtwist.fact_homology import compactification_algebra, manifold
from bvtwist.weyl_dot import WeylAlgebra, dot_check, heisenberg_enveloping_dims, oracle_sweep

W = WeylAlgebra([0], 4)
x, d = W.x(0), W.d(0)
print("∂·x   =", W.serialize(W.product(d, x))["terms"])
print("∂²·x  =", W.serialize(W.product(W.product(d, d), x))["terms"])

print("PBW vs Sym, one even pair:", heisenberg_enveloping_dims([0], 4)["matches"])
print("PBW vs Sym, one odd pair: ", heisenberg_enveloping_dims([1], 4)["table"])

for N in ("S3", "T3"):
    D = compactification_algebra(manifold(N), abelian(1), cap=4)
    n, bad = oracle_sweep(D.weyl)
    print(f"{N}: x-degrees {D.base_degrees}  pairs checked {n}  disagreements {len(bad)}  dot {dot_check(D).passed}")

D = compactification_algebra(manifold("S3"), preset("sl2"), cap=3)
print(D.name, "blocks:", len(D.dims), " dot:", dot_check(D).passed, " first page:", D.first_page["square_zero"])
