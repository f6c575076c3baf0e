"""Determinant-line degrees across the shipped 4-manifolds."""
from bvtwist.dg_lie import preset
from bvtwist.fact_homology import det_line_degree, load_catalogue, shift_coefficient

cat = load_catalogue()
algebras = ["abelian:1", "sl2", "sl3"]

print("c_k for k = 0..4:", [shift_coefficient(k) for k in range(5)])
print(f"{'M':<12}{'chi':>5}" + "".join(f"{a:>12}" for a in algebras))
for name, M in cat.items():
    if M.dim != 4:
        continue
    cells = []
    for a in algebras:
        r = det_line_degree(M, preset(a))
        cells.append(f"{r.d_M}{'' if r.parity_ok else '!'}")
    print(f"{name:<12}{M.chi:>5}" + "".join(f"{c:>12}" for c in cells))

# per-degree bookkeeping for one case
r = det_line_degree(cat["CP2"], preset("sl2"))
print("CP2 ⊗ sl2 per degree:", r.per_degree, " contributions:", r.contributions)

hopf = det_line_degree(cat["Hopf"], preset("sl2")).as_dict()
print("Hopf: parity", hopf["parity"], " holomorphic Euler parity", hopf["holomorphic_euler_parity"])
