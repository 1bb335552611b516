"""Three mixed qubit states diag(1/3, 2/3) rotated by 120 degrees.

Compares the constructed measurement against a brute-force scan over the
Bloch parameters of pi0.
"""
import numpy as np

from symdisc import gallery, oracle, solve

fam = gallery.build_ex2()
poms, report = solve(fam)
print("closed form P_error:", report.p_error, "(5/9 =", 5 / 9, ")")
print("pi0 =\n", np.round(poms[0][0].real, 12))

scan = oracle.bloch_search(fam, 101)
print(f"Bloch scan optimum: b1 = {scan.b1:+.4f}, b3 = {scan.b3:+.4f}, P_error = {scan.p_error:.12f}")

for name, value in [("pairwise residual", report.pairwise_residual),
                    ("global min eigenvalue", report.global_min_eigenvalue)]:
    print(f"{name:>22}: {value: .2e}")
