"""N pure qubit states spaced evenly around a great circle.

The optimal error falls as 1 - 2/N: two orthogonal directions are all a qubit
can resolve, so every extra state is a loss.
"""
import numpy as np

from symdisc import gallery, solve

for n in range(2, 8):
    poms, report = solve(gallery.build_ex1(n))
    print(f"N = {n}:  P_error = {report.p_error:.6f}   (1 - 2/N = {1 - 2 / n:.6f})")

# pi0 for N = 4 is a rank-one projector onto the first state, scaled by 2/N
poms, _ = solve(gallery.build_ex1(4))
print(np.round(poms[0][0].real, 6))
