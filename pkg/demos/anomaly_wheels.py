"""Wheel weights on a doubled algebra vanish; without the doubling they don't."""
from fractions import Fraction

from bvtwist.anomaly import admissible_orientations, anomaly_vanishing_report, wheel_algebraic_weight
from bvtwist.dg_lie import epsilon_extend, preset

g = preset("sl2")
H = {2: 1}  # Cartan element in the basis E12, E21, H1

# str((ad_H)^v) on sl2 alone: the Killing form shows up at v = 2
for v in range(1, 5):
    print("sl2      v =", v, " weight =", wheel_algebraic_weight(g, v, H))

# after adjoining an odd copy the two blocks cancel
L = epsilon_extend(g, 1)
for v in range(1, 5):
    print("sl2[δ]   v =", v, " weight =", wheel_algebraic_weight(L, v, H))

rep = anomaly_vanishing_report(preset("gl3"), delta_degree=1, v_max=6, samples=10, seed=1)
print("gl3[δ]: all zero =", rep.all_zero, " blockwise proof =", rep.structural["proved"],
      " rows =", len(rep.rows))

# the theta graph has no orientation with in-degree ≤ 1 everywhere
print("theta orientations:", admissible_orientations([0, 1], [(0, 1)] * 3))
print("triangle orientations:", admissible_orientations([0, 1, 2], [(0, 1), (1, 2), (2, 0)]))

# a random rational X, just to see a nonzero undoubled value
X = {0: Fraction(1, 2), 1: Fraction(-3), 2: Fraction(2)}
print("sl2 at X, v = 2:", wheel_algebraic_weight(g, 2, X))
