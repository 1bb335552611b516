"""Certification and Monte Carlo on the gallery, plus a deliberately broken POM."""
from symdisc import gallery, oracle, solve
from symdisc.optmeas import build_pom

for name in ("ex2", "ex3"):
    prob = gallery.build(name)
    res = oracle.certify(prob, grid_steps=51)
    print(f"{name}: certified = {res.certified}, gap to search = {res.gap:.2e}")

    poms, report = solve(prob)
    sim = oracle.simulate(prob, poms, shots=200_000, seed=1)
    print(f"     simulated {sim.empirical_error_rate:.5f} vs {sim.analytic_p_error:.5f}"
          f" (3 sigma = {3 * sim.sigma:.5f})")

fam = gallery.build_ex2()
bad = oracle.perturb_pom(fam, build_pom(fam), oracle.NEGATIVE_CONTROL_SCALE)
res = oracle.certify(fam, grid_steps=51, poms=[bad])
print(f"perturbed ex2: certified = {res.certified}, pairwise residual = "
      f"{res.report.pairwise_residual:.2e}, P_error = {res.report.p_error:.5f}")
