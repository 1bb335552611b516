"""Independent checks on the constructed measurement.

* ``ansatz_search`` brute-forces the symmetric ansatz pi_k = R^k pi0 R^{dag k}.
  Completeness of that ansatz pins the diagonal of pi0 (in the eigenbasis of
  R) to 1/N, leaving only the off-diagonal entries to scan.
* ``bloch_search`` is the direct qubit optimization over Bloch coefficients.
* ``simulate`` draws measurement outcomes with a fixed, portable PRNG.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, product

import numpy as np

from . import cxmat, optmeas
from .cxmat import MatrixError, frobenius_norm
from .gallery import rotation
from .optmeas import Pom
from .symstates import DirectSumProblem, SymmetricFamily, as_problem, generate_states

DEFAULT_GRID_STEPS = 201
#: grid used for 3-dimensional blocks, where the full 201-step grid is infeasible
GRID_STEPS_3D = 11
ORACLE_TOL = 2e-3
NORMALIZATION_TOL = 1e-9

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


@dataclass(frozen=True)
class AnsatzSearchResult:
    best_pi0: np.ndarray
    best_p_error: float
    grid_steps: int
    evaluations: int

    @property
    def best_correct(self) -> float:
        return 1.0 - self.best_p_error


@dataclass(frozen=True)
class BlochSearchResult:
    b0: float
    b1: float
    b3: float
    p_error: float
    grid_steps: int = DEFAULT_GRID_STEPS


def _principal_minors_ok(mats: np.ndarray, tol: float) -> np.ndarray:
    """PSD test for a batch of Hermitian matrices via all principal minors."""
    d = mats.shape[-1]
    ok = np.ones(mats.shape[0], dtype=bool)
    for size in range(1, d + 1):
        for idx in combinations(range(d), size):
            sub = mats[:, idx][:, :, idx]
            ok &= np.linalg.det(sub).real >= -tol
    return ok


def ansatz_search(family: SymmetricFamily, grid_steps: int = DEFAULT_GRID_STEPS) -> AnsatzSearchResult:
    """Exhaustive search of the symmetric POM ansatz on a polar grid.

    Every off-diagonal entry ``x = r e^{i theta}`` of pi0 (eigenbasis of R) is
    scanned over ``r`` in ``linspace(0, 1/N, grid_steps)`` and ``theta`` over
    ``grid_steps`` equispaced angles in [0, 2 pi).  Non-PSD candidates are
    discarded; the feasible candidate maximizing tr(pi0 rho0) wins, ties going
    to the smallest flat grid index.
    """
    d, n = family.dim, family.n
    if d > 3:
        raise MatrixError(f"ansatz_search supports d <= 3, got d = {d}")
    if grid_steps < 11:
        raise ValueError("grid_steps must be at least 11")
    rho = np.asarray(family.rho0_lambda, dtype=np.complex128)
    diag_part = np.trace(rho).real / n

    if d == 1:
        pi0 = np.array([[1.0 / n]], dtype=np.complex128)
        return AnsatzSearchResult(family.from_lambda(pi0), 1.0 - diag_part, grid_steps, 1)

    radii = np.linspace(0.0, 1.0 / n, grid_steps)
    angles = 2 * np.pi * np.arange(grid_steps) / grid_steps
    values = (radii[:, None] * np.exp(1j * angles[None, :])).reshape(-1)
    pairs = list(combinations(range(d), 2))

    best_val, best_x = -np.inf, None
    evaluations = 0
    # outer loop over the first entry keeps the batch small for d = 3
    for x0 in values:
        rest = [values] * (len(pairs) - 1)
        grid = np.array(list(product([x0], *rest)) if rest else [[x0]])
        mats = np.zeros((grid.shape[0], d, d), dtype=np.complex128)
        for i in range(d):
            mats[:, i, i] = 1.0 / n
        for c, (i, j) in enumerate(pairs):
            mats[:, i, j] = grid[:, c]
            mats[:, j, i] = grid[:, c].conj()
        feasible = _principal_minors_ok(mats, 1e-14) if d > 2 else np.ones(len(grid), bool)
        # tr(pi0 rho) = diag part + 2 Re sum_{i<j} x_ij rho_ji
        obj = diag_part + 2 * sum((grid[:, c] * rho[j, i]).real for c, (i, j) in enumerate(pairs))
        obj = np.where(feasible, obj, -np.inf)
        evaluations += len(grid)
        k = int(np.argmax(obj))
        if obj[k] > best_val:
            best_val, best_x = obj[k], mats[k]

    return AnsatzSearchResult(cxmat._frozen(family.from_lambda(best_x)), float(1.0 - best_val),
                              grid_steps, evaluations)


def bloch_pom(b1: float, b3: float, r: np.ndarray, n: int = 3) -> list[np.ndarray]:
    """pi_k = R^k (I/3 + b1 sigma_x + b3 sigma_z) R^{dag k}."""
    pi0 = np.eye(2) / n + b1 * SIGMA_X + b3 * SIGMA_Z
    out = [pi0]
    for _ in range(n - 1):
        out.append(r @ out[-1] @ r.conj().T)
    return out


def bloch_search(family: SymmetricFamily, grid_steps: int = DEFAULT_GRID_STEPS) -> BlochSearchResult:
    """Direct qubit optimization for three states related by a 120 degree rotation.

    ``(b1, b3)`` range over a ``grid_steps x grid_steps`` square grid on
    [-1/3, 1/3]^2 restricted to the disk b1^2 + b3^2 <= 1/9 (positivity of pi0
    with b0 = 1/3 fixed by completeness).
    """
    r = rotation(2 * np.pi / 3)
    if family.dim != 2 or family.n != 3:
        raise ValueError("bloch_search needs a qubit family with N = 3")
    if frobenius_norm(family.sym.matrix - r) > 1e-9:
        raise ValueError("bloch_search needs R = R(2 pi / 3) about the 2-axis")
    states = generate_states(family)
    b0 = 1.0 / 3
    axis = np.linspace(-b0, b0, grid_steps)
    best = (np.inf, 0.0, 0.0)
    for b1, b3 in product(axis, axis):
        if b1 * b1 + b3 * b3 > b0 * b0 + 1e-12:
            continue
        pom = bloch_pom(b1, b3, r)
        p = 1.0 - optmeas.correct_probability(states, pom, [b0] * 3)
        if p < best[0]:
            best = (p, b1, b3)
    return BlochSearchResult(b0, float(best[1]), float(best[2]), float(best[0]), grid_steps)


# --- sampling ----------------------------------------------------------------

_GAMMA = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def splitmix64(seed: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start .. start+count-1`` of the SplitMix64 stream for ``seed``.

    State transition: ``s_i = seed + (i + 1) * 0x9E3779B97F4A7C15 (mod 2^64)``;
    output: ``z = s_i; z ^= z >> 30; z *= 0xBF58476D1CE4E5B9; z ^= z >> 27;
    z *= 0x94D049BB133111EB; z ^= z >> 31``.  All arithmetic is on uint64, so
    the stream is bit-identical on every platform.
    """
    i = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed % 2 ** 64) + i * _GAMMA
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
    return z ^ (z >> np.uint64(31))


def uniforms(seed: int, start: int, count: int) -> np.ndarray:
    """Doubles in [0, 1) from the top 53 bits of each SplitMix64 output."""
    return (splitmix64(seed, start, count) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53


def outcome_table(problem, poms) -> np.ndarray:
    """P[j, k] = tr(pi_k rho_j), validated and renormalized."""
    problem = as_problem(problem)
    n = problem.n
    table = np.zeros((n, n))
    for fam, pom in zip(problem.blocks, poms):
        states = generate_states(fam)
        for j in range(n):
            for k in range(n):
                table[j, k] += np.trace(pom[k] @ states[j]).real
    if table.min() < -1e-10:
        raise ValueError(f"negative outcome probability {table.min():.3e}")
    sums = table.sum(axis=1)
    if np.abs(sums - 1).max() > NORMALIZATION_TOL:
        raise ValueError(f"outcome distribution not normalized (row sums {sums})")
    table = np.clip(table, 0.0, 1.0)
    return table / table.sum(axis=1, keepdims=True)


@dataclass(frozen=True)
class SimulationResult:
    shots: int
    errors: int
    empirical_error_rate: float
    analytic_p_error: float
    seed: int

    @property
    def sigma(self) -> float:
        p = min(max(self.analytic_p_error, 0.0), 1.0)
        return float(np.sqrt(p * (1 - p) / self.shots))

    @property
    def passed(self) -> bool:
        dev = abs(self.empirical_error_rate - self.analytic_p_error)
        return dev <= 3 * self.sigma + 1e-12


def simulate(problem, poms, shots: int, seed: int, chunk: int = 1 << 20) -> SimulationResult:
    """Monte Carlo estimate of the error rate.

    Shot ``i`` consumes stream outputs ``2i`` (true index, uniform over N) and
    ``2i + 1`` (outcome, inverse CDF of row j of :func:`outcome_table`).
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    problem = as_problem(problem)
    if isinstance(poms, Pom):
        poms = [poms]
    n = problem.n
    table = outcome_table(problem, poms)
    cdf = np.cumsum(table, axis=1)
    analytic = 1.0 - float(np.trace(table)) / n

    errors = 0
    for begin in range(0, shots, chunk):
        m = min(chunk, shots - begin)
        u = uniforms(seed, 2 * begin, 2 * m).reshape(m, 2)
        j = np.minimum((u[:, 0] * n).astype(np.int64), n - 1)
        k = (cdf[j] <= u[:, 1:2]).sum(axis=1)
        k = np.minimum(k, n - 1)
        errors += int(np.count_nonzero(k != j))
    return SimulationResult(shots, errors, errors / shots, analytic, seed)


# --- certification -----------------------------------------------------------

NEGATIVE_CONTROL_SCALE = 0.05


def perturb_pom(family: SymmetricFamily, pom: Pom, scale: float = 0.01) -> Pom:
    """Negative control: pi0 += scale * diag(1, -1, 0, ...), symmetrize, renormalize.

    The perturbed pi0 is rotated around the orbit and the set is pushed back to
    completeness with S^{-1/2} pi_k S^{-1/2}, S = sum_k pi_k.
    """
    d = family.dim
    if d < 2:
        return pom
    delta = np.zeros((d, d), dtype=np.complex128)
    delta[0, 0], delta[1, 1] = scale, -scale
    pi0 = pom[0] + delta
    r = family.sym.matrix
    elems = [pi0]
    for _ in range(family.n - 1):
        elems.append(r @ elems[-1] @ r.conj().T)
    s = cxmat.inverse_sqrt(sum(elems))
    return Pom(tuple(s @ e @ s for e in elems))


@dataclass(frozen=True)
class CertificationResult:
    report: optmeas.OptimalityReport
    searches: tuple[AnsatzSearchResult, ...]
    oracle_p_error: float
    tolerance: float = ORACLE_TOL

    @property
    def gap(self) -> float:
        """Closed-form error minus the best error the oracle found."""
        return self.report.p_error - self.oracle_p_error

    @property
    def certified(self) -> bool:
        return self.report.optimal and self.gap <= self.tolerance


def certify(problem, grid_steps: int = DEFAULT_GRID_STEPS, poms=None,
            tol_scale: float = 1.0) -> CertificationResult:
    """Condition checks plus ansatz-search comparison.

    ``poms`` overrides the constructed POMs (used to inject broken
    measurements).  Blocks of dimension 3 are searched on a
    ``GRID_STEPS_3D`` grid; blocks above 3 are not searched and contribute
    their closed-form value to the oracle total.
    """
    problem = as_problem(problem)
    if poms is None:
        poms, report = optmeas.solve(problem, tol_scale=tol_scale)
    else:
        report = optmeas.evaluate(problem, poms, tol_scale)
    searches = []
    oracle_correct = 0.0
    for fam, block in zip(problem.blocks, report.blocks):
        if fam.dim > 3:
            oracle_correct += block.correct_probability
            continue
        steps = grid_steps if fam.dim < 3 else min(grid_steps, GRID_STEPS_3D)
        res = ansatz_search(fam, steps)
        searches.append(res)
        oracle_correct += res.best_correct
    return CertificationResult(report, tuple(searches), 1.0 - oracle_correct)
