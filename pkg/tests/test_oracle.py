import numpy as np
import pytest

from symdisc import gallery, oracle
from symdisc.cxmat import MatrixError
from symdisc.optmeas import build_pom, solve
from symdisc.symstates import make_family, random_family

MASK = (1 << 64) - 1


def splitmix64_ref(seed, count):
    """Scalar pure-Python SplitMix64, written independently of the package."""
    state, out = seed & MASK, []
    for _ in range(count):
        state = (state + 0x9E3779B97F4A7C15) & MASK
        z = state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK
        out.append(z ^ (z >> 31))
    return out


class TestAnsatzSearch:
    def test_ex2(self):
        res = oracle.ansatz_search(gallery.build_ex2(), 201)
        assert res.evaluations == 201 * 201
        assert res.best_p_error == pytest.approx(5 / 9, abs=2e-3)
        assert res.best_p_error >= 5 / 9 - 1e-12

    def test_dim1(self):
        fam = make_family(np.eye(1), [[1.0]], 4, 1)
        res = oracle.ansatz_search(fam)
        assert res.best_p_error == pytest.approx(0.75)
        assert res.evaluations == 1

    def test_random_d2_never_beats_closed_form(self):
        for seed in range(20):
            fam = random_family(2, 2 + seed % 5, (-1) ** seed, 500 + seed)
            closed = solve(fam)[1].p_error
            res = oracle.ansatz_search(fam, 101)
            assert res.best_p_error >= closed - 1e-12
            assert res.best_p_error - closed <= 2e-3

    def test_d3_small_grid(self):
        prob = gallery.build_ex3()
        fam = prob.blocks[0]
        res = oracle.ansatz_search(fam, oracle.GRID_STEPS_3D)
        closed = solve(prob)[1].blocks[0].correct_probability
        assert res.best_correct <= closed + 1e-12

    def test_limits(self):
        with pytest.raises(MatrixError):
            oracle.ansatz_search(random_family(4, 4, 1, 0))
        with pytest.raises(ValueError):
            oracle.ansatz_search(gallery.build_ex2(), 5)


class TestBlochSearch:
    def test_ex2_optimum(self):
        res = oracle.bloch_search(gallery.build_ex2(), 201)
        cell = (2 / 3) / 200
        assert abs(res.b1) <= cell
        assert abs(res.b3 + 1 / 3) <= cell
        assert res.p_error == pytest.approx(5 / 9, abs=1e-12)

    def test_landscape_linear_in_b3(self):
        # for rho0 = diag(1/3, 2/3): P_error = 2/3 + b3 / 3, independent of b1
        fam = gallery.build_ex2()
        r = gallery.rotation(2 * np.pi / 3)
        states = [np.linalg.matrix_power(r, k) @ fam.rho0 @ np.linalg.matrix_power(r, k).T
                  for k in range(3)]
        for b1 in np.linspace(-1 / 3, 1 / 3, 9):
            for b3 in np.linspace(-1 / 3, 1 / 3, 9):
                pom = oracle.bloch_pom(b1, b3, r)
                p = 1 - sum(np.trace(e @ s).real for e, s in zip(pom, states)) / 3
                assert p == pytest.approx(2 / 3 + b3 / 3, abs=1e-12)

    def test_maximally_mixed_is_flat(self):
        fam = make_family(gallery.rotation(2 * np.pi / 3), np.eye(2) / 2, 3, -1)
        res = oracle.bloch_search(fam, 21)
        assert res.p_error == pytest.approx(2 / 3, abs=1e-12)

    def test_rejects_other_families(self):
        with pytest.raises(ValueError):
            oracle.bloch_search(gallery.build_ex1(4))


class TestSplitMix:
    def test_against_reference(self):
        for seed in (0, 1, 12345, 2 ** 64 - 1):
            got = [int(x) for x in oracle.splitmix64(seed, 0, 50)]
            assert got == splitmix64_ref(seed, 50)

    def test_known_first_output(self):
        assert int(oracle.splitmix64(0, 0, 1)[0]) == 0xE220A8397B1DCDAF

    def test_offset(self):
        full = oracle.splitmix64(7, 0, 20)
        np.testing.assert_array_equal(oracle.splitmix64(7, 13, 7), full[13:])

    def test_uniforms_range(self):
        u = oracle.uniforms(3, 0, 10000)
        assert u.min() >= 0 and u.max() < 1
        assert abs(u.mean() - 0.5) < 0.02


class TestSimulation:
    def test_outcome_table_ex2(self):
        fam = gallery.build_ex2()
        t = oracle.outcome_table(fam, [build_pom(fam)])
        np.testing.assert_allclose(t.sum(axis=1), 1, atol=1e-15)
        np.testing.assert_allclose(np.diag(t), [4 / 9] * 3, atol=1e-12)

    def test_deterministic(self):
        prob = gallery.build_ex3()
        poms, _ = solve(prob)
        a = oracle.simulate(prob, poms, 20000, 5)
        b = oracle.simulate(prob, poms, 20000, 5)
        assert a == b
        c = oracle.simulate(prob, poms, 20000, 6)
        assert c.errors != a.errors

    def test_chunking_invariant(self):
        fam = gallery.build_ex2()
        poms, _ = solve(fam)
        a = oracle.simulate(fam, poms, 10000, 1)
        b = oracle.simulate(fam, poms, 10000, 1, chunk=777)
        assert a.errors == b.errors

    def test_single_state_no_errors(self):
        fam = make_family(np.eye(1), [[1.0]], 1, 1)
        poms, _ = solve(fam)
        res = oracle.simulate(fam, poms, 1000, 0)
        assert res.errors == 0 and res.analytic_p_error == pytest.approx(0)
        assert res.passed

    def test_ex2_rate(self):
        fam = gallery.build_ex2()
        poms, _ = solve(fam)
        res = oracle.simulate(fam, poms, 200000, 11)
        assert res.analytic_p_error == pytest.approx(5 / 9, abs=1e-12)
        assert res.passed

    def test_shots_positive(self):
        fam = gallery.build_ex2()
        with pytest.raises(ValueError):
            oracle.simulate(fam, solve(fam)[0], 0, 0)


class TestCertify:
    def test_ex2(self):
        res = oracle.certify(gallery.build_ex2())
        assert res.certified
        assert -1e-12 <= res.gap <= 2e-3

    def test_ex3(self):
        res = oracle.certify(gallery.build_ex3())
        assert res.certified
        assert res.report.p_error == pytest.approx((3 - np.sqrt(2)) / 6, abs=1e-10)

    def test_perturbed_fails(self):
        fam = gallery.build_ex2()
        pom = oracle.perturb_pom(fam, build_pom(fam), oracle.NEGATIVE_CONTROL_SCALE)
        res = oracle.certify(fam, 51, poms=[pom])
        assert not res.certified
        assert res.report.pairwise_residual > 1e-3

    def test_perturbed_pom_is_complete(self):
        fam = gallery.build_ex2()
        pom = oracle.perturb_pom(fam, build_pom(fam), 0.05)
        assert pom.completeness_residual() <= 1e-12

    def test_tol_scale_never_certifies(self):
        res = oracle.certify(gallery.build_ex2(), 51, tol_scale=2.0)
        assert not res.certified
