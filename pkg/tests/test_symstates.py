import numpy as np
import pytest

from symdisc import gallery
from symdisc.symstates import (DegeneracyError, DirectSumProblem, FamilyError,
                               NegativeEntry, OrderError, PhaseInconsistency,
                               UnitarityError, fix_phases, generate_states,
                               make_family, random_family, spectral_projectors)

from conftest import disguised


def eigvals_of(pairs):
    return sorted((np.angle(b) for b, _ in pairs))


class TestSpectralProjectors:
    def test_rotation_2pi_over_3(self):
        pairs = spectral_projectors(gallery.rotation(2 * np.pi / 3), 3, -1)
        assert len(pairs) == 2
        np.testing.assert_allclose(eigvals_of(pairs), [-np.pi / 3, np.pi / 3], atol=1e-12)
        for b, p in pairs:
            assert np.trace(p).real == pytest.approx(1.0)

    def test_trivial(self):
        pairs = spectral_projectors(np.eye(1), 1, 1)
        assert len(pairs) == 1
        assert pairs[0][0] == pytest.approx(1)
        np.testing.assert_allclose(pairs[0][1], [[1]])

    def test_spin1_rotation(self):
        pairs = spectral_projectors(gallery.EX3_R_SPIN1, 3, 1)
        np.testing.assert_allclose(eigvals_of(pairs), [-2 * np.pi / 3, 0, 2 * np.pi / 3],
                                   atol=1e-12)

    def test_projectors_are_eigenprojectors(self):
        r = gallery.EX3_R_SPIN1
        for b, p in spectral_projectors(r, 3, 1):
            np.testing.assert_allclose(r @ p, b * p, atol=1e-12)

    @pytest.mark.parametrize("seed", range(10))
    def test_complete_and_idempotent(self, seed):
        fam = random_family(1 + seed % 4, 4 + seed % 3, (-1) ** seed, seed)
        pairs = spectral_projectors(fam.sym.matrix, fam.n, fam.sym.sign)
        total = sum(p for _, p in pairs)
        assert np.linalg.norm(total - np.eye(fam.dim)) <= 1e-9
        for _, p in pairs:
            assert np.linalg.norm(p @ p - p) <= 1e-9

    def test_non_unitary(self):
        with pytest.raises(UnitarityError):
            spectral_projectors(np.diag([1.0, 0.5]), 2, 1)

    def test_wrong_order(self):
        with pytest.raises(OrderError):
            spectral_projectors(gallery.rotation(2 * np.pi / 3), 3, 1)

    def test_degenerate(self):
        with pytest.raises(DegeneracyError):
            spectral_projectors(np.diag([1.0, 1.0, -1.0]), 2, 1)


class TestFixPhases:
    def test_ex2_basis(self):
        r = gallery.rotation(2 * np.pi / 3)
        rho0 = np.diag([1 / 3, 2 / 3])
        basis = fix_phases(spectral_projectors(r, 3, -1), rho0)
        m = basis.conj().T @ rho0 @ basis
        np.testing.assert_allclose(m, [[0.5, 1 / 6], [1 / 6, 0.5]], atol=1e-14)
        # columns span the reference rays (1/sqrt2)(-i, 1) and (1/sqrt2)(i, 1)
        refs = np.array([[-1j, 1], [1j, 1]]) / np.sqrt(2)
        overlaps = np.abs(refs.conj() @ basis)
        np.testing.assert_allclose(np.sort(overlaps.max(axis=0)), [1, 1], atol=1e-14)

    def test_diagonal_r_identity_rephasing(self):
        rho0 = np.array([[0.6, 0.2], [0.2, 0.4]])
        r = np.diag([1.0, -1.0])
        basis = fix_phases(spectral_projectors(r, 2, 1), rho0)
        np.testing.assert_allclose(np.abs(basis), np.eye(2), atol=1e-15)
        np.testing.assert_allclose(basis.conj().T @ rho0 @ basis, rho0, atol=1e-15)

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_uniform_rho0(self, d):
        r, rho0 = disguised(np.full((d, d), 1 / d), n=5, seed=d)
        basis = fix_phases(spectral_projectors(r, 5, 1), rho0)
        np.testing.assert_allclose(basis.conj().T @ rho0 @ basis, np.full((d, d), 1 / d),
                                   atol=1e-12)

    def test_negative_cycle(self):
        rho_l = np.array([[0.4, -0.1, 0.1], [-0.1, 0.3, 0.1], [0.1, 0.1, 0.3]])
        r, rho0 = disguised(rho_l, n=3)
        with pytest.raises(NegativeEntry, match="nonnegativ"):
            fix_phases(spectral_projectors(r, 3, 1), rho0)

    def test_complex_cycle(self):
        rho_l = np.array([[0.4, 0.1, 0.1], [0.1, 0.3, 0.1j], [0.1, -0.1j, 0.3]])
        r, rho0 = disguised(rho_l, n=3)
        with pytest.raises(PhaseInconsistency):
            fix_phases(spectral_projectors(r, 3, 1), rho0)

    def test_phase_recovery_round_trip_100(self):
        for seed in range(100):
            dim = 1 + seed % 4
            fam = random_family(dim, dim + seed % 3, (-1) ** (seed // 2), seed)
            m = fam.basis.conj().T @ fam.rho0 @ fam.basis
            assert np.abs(m.imag).max() <= 1e-9
            assert m.real.min() >= -1e-10


class TestFamily:
    def test_generate_states_ex2(self):
        fam = gallery.build_ex2()
        states = generate_states(fam)
        r = gallery.rotation(2 * np.pi / 3)
        np.testing.assert_array_equal(states[0], fam.rho0)
        np.testing.assert_allclose(states[1], r @ np.diag([1 / 3, 2 / 3]) @ r.T, atol=1e-15)
        for s in states:
            assert np.trace(s).real == pytest.approx(1.0)
            np.testing.assert_allclose(np.linalg.eigvalsh(s), [1 / 3, 2 / 3], atol=1e-14)

    def test_ex3_states_match_two_qubit_construction(self):
        # spin-1 blocks of the product-space states, by explicit change of basis
        u = gallery.coupling_basis()
        blocks = [(u.conj().T @ rho @ u)[:3, :3] for rho in gallery.ex3_two_qubit_states()]
        fam = gallery.build_ex3().blocks[0]
        for got, ref in zip(generate_states(fam), blocks):
            np.testing.assert_allclose(got, ref, atol=1e-12)

    @pytest.mark.parametrize("seed", range(20))
    def test_state_symmetry_and_closure(self, seed):
        fam = random_family(1 + seed % 4, 4 + seed % 3, (-1) ** seed, seed)
        states = generate_states(fam)
        r = fam.sym.matrix
        for a, b in zip(states, states[1:]):
            assert np.linalg.norm(r @ a @ r.conj().T - b) <= 1e-10
        closing = r @ states[-1] @ r.conj().T
        assert np.linalg.norm(closing - states[0]) <= 1e-10

    def test_random_family_dim1(self):
        fam = random_family(1, 3, 1, 0)
        np.testing.assert_allclose(fam.rho0, [[1]])

    def test_random_family_square_uses_all_roots(self):
        fam = random_family(4, 4, -1, 3)
        assert len(fam.sym.eigenvalues) == 4
        np.testing.assert_allclose(np.sort(np.angle(fam.sym.eigenvalues)),
                                   np.sort(np.angle(np.exp(1j * np.pi * (2 * np.arange(4) + 1) / 4))))

    def test_random_family_deterministic(self):
        a, b = random_family(2, 3, 1, 42), random_family(2, 3, 1, 42)
        np.testing.assert_array_equal(a.rho0, b.rho0)
        np.testing.assert_array_equal(a.sym.matrix, b.sym.matrix)

    def test_random_family_rejects_dim_above_n(self):
        with pytest.raises(ValueError):
            random_family(4, 3)

    def test_dimension_above_n(self):
        with pytest.raises(FamilyError):
            make_family(np.diag([1, -1, 1j]), np.eye(3) / 3, 2, 1)

    def test_trace_mismatch(self):
        with pytest.raises(FamilyError, match="trace"):
            make_family(np.diag([1.0, -1.0]), np.eye(2), 2, 1)

    def test_not_psd(self):
        with pytest.raises(FamilyError, match="positivity"):
            make_family(np.diag([1.0, -1.0]), [[0.5, 0.9], [0.9, 0.5]], 2, 1)

    def test_disconnected_graph_flagged(self):
        fam = make_family(np.diag([1.0, -1.0]), np.diag([0.3, 0.7]), 2, 1)
        assert fam.phase_components == 2
        assert not fam.connected


class TestDirectSum:
    def test_traces(self):
        prob = gallery.build_ex3()
        assert prob.block_traces == pytest.approx([5 / 8, 3 / 8])

    def test_traces_must_sum_to_one(self):
        blk = make_family(np.eye(1), [[0.5]], 3, 1, weight=0.5)
        with pytest.raises(FamilyError):
            DirectSumProblem((blk,))

    def test_blocks_share_n(self):
        a = make_family(np.eye(1), [[0.5]], 3, 1, weight=0.5)
        b = make_family(np.eye(1), [[0.5]], 2, 1, weight=0.5)
        with pytest.raises(FamilyError):
            DirectSumProblem((a, b))
