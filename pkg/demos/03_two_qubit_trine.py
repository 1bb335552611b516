"""Symmetrized two-qubit trine states.

R (x) R is degenerate on the product space, but it splits into a spin-1
block (three distinct eigenvalues) and a spin-0 block, each handled on its own.
"""
import numpy as np

from symdisc import gallery, solve
from symdisc.optmeas import build_phi2

prob = gallery.build_ex3()
poms, report = solve(prob)
print("block traces:", prob.block_traces)
for i, blk in enumerate(report.blocks):
    print(f"block {i}: d = {blk.dim}, contributes P_correct = {blk.correct_probability:.12f}")
print("P_error =", report.p_error, " (3 - sqrt2)/6 =", (3 - np.sqrt(2)) / 6)

# Phi2 with phi0 = |1,-1>; its overlaps are all positive, so Phi2 equals Phi^-1/2 here
phi2 = build_phi2(prob.blocks[0], np.array([0, 0, 1], dtype=complex))
print("Phi2 * sqrt6 =\n", np.round(phi2.matrix.real * np.sqrt(6), 10))
