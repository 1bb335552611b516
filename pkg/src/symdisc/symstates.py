"""Z_N-symmetric state ensembles.

An ensemble is generated from a seed state ``rho0`` and a unitary ``R`` with
``R**N = +/- 1``:  ``rho_k = R^k rho0 R^{dagger k}``.  The eigenbasis of ``R``
is obtained from character projectors rather than a general eigensolver, and
its phases are fixed so that ``rho0`` has real, nonnegative entries in it.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import cxmat
from .cxmat import as_matrix, frobenius_norm

STRUCT_TOL = 1e-9
PROJECTOR_CUTOFF = 1e-8
EDGE_CUTOFF = 1e-10
NEG_FLOOR = 1e-10


class FamilyError(ValueError):
    """A symmetric family failed validation.

    ``invariant`` names the violated property so callers (the CLI in
    particular) can report it without parsing messages.
    """

    invariant = "family"

    def __init__(self, message: str, invariant: str | None = None):
        super().__init__(message)
        if invariant is not None:
            self.invariant = invariant


class UnitarityError(FamilyError):
    invariant = "unitarity"


class OrderError(FamilyError):
    invariant = "order"


class DegeneracyError(FamilyError):
    invariant = "nondegeneracy"


class PhaseInconsistency(FamilyError):
    invariant = "phase-consistency"


class NegativeEntry(FamilyError):
    invariant = "nonnegativity"


def candidate_eigenvalues(n: int, sign: int) -> np.ndarray:
    """The N roots of ``sign``: exp(i*pi*(2m + s)/n), s = 0 for +1 and 1 for -1."""
    s = 0 if sign == 1 else 1
    m = np.arange(n)
    return np.exp(1j * np.pi * (2 * m + s) / n)


def _check_operator(r: np.ndarray, n: int, sign: int) -> None:
    if r.shape[0] != r.shape[1]:
        raise UnitarityError(f"unitarity: R must be square, got {r.shape}")
    if sign not in (1, -1):
        raise OrderError(f"order: sign must be +1 or -1, got {sign!r}")
    if n < 1:
        raise OrderError(f"order: N must be positive, got {n}")
    d = r.shape[0]
    unit_res = frobenius_norm(r @ r.conj().T - np.eye(d))
    if unit_res > STRUCT_TOL:
        raise UnitarityError(f"unitarity violated: ||R R^dagger - 1||_F = {unit_res:.3e}")
    order_res = frobenius_norm(np.linalg.matrix_power(r, n) - sign * np.eye(d))
    if order_res > STRUCT_TOL:
        raise OrderError(
            f"order violated: ||R^{n} - ({sign:+d})1||_F = {order_res:.3e}"
        )


def spectral_projectors(r, n: int, sign: int) -> list[tuple[complex, np.ndarray]]:
    """Eigen-projectors of a Z_N operator from character sums.

    For each root ``b_m`` of ``sign`` the projector is
    ``P_m = (1/n) sum_k b_m^{-k} R^k``; roots whose projector vanishes are not
    eigenvalues of ``R`` and are dropped.  Every surviving projector must have
    unit trace, otherwise ``R`` is degenerate.
    """
    r = as_matrix(r, copy=False)
    _check_operator(r, n, sign)
    d = r.shape[0]
    powers = [np.eye(d, dtype=np.complex128)]
    for _ in range(n - 1):
        powers.append(powers[-1] @ r)

    out = []
    for b in candidate_eigenvalues(n, sign):
        p = sum(b ** (-k) * powers[k] for k in range(n)) / n
        if frobenius_norm(p) <= PROJECTOR_CUTOFF:
            continue
        tr = np.trace(p).real
        if abs(tr - 1.0) > PROJECTOR_CUTOFF:
            raise DegeneracyError(
                f"nondegeneracy violated: eigenvalue {b:.6g} has multiplicity {tr:.3g}"
            )
        p.setflags(write=False)
        out.append((complex(b), p))

    total = sum(p for _, p in out)
    if frobenius_norm(total - np.eye(d)) > STRUCT_TOL:
        raise DegeneracyError("nondegeneracy: projectors do not resolve the identity")
    return out


def _unit_vector(p: np.ndarray) -> np.ndarray:
    col = np.argmax(np.linalg.norm(p, axis=0))
    v = p[:, col] / np.linalg.norm(p[:, col])
    # deterministic phase: first entry of (near) largest magnitude is real positive
    mags = np.abs(v)
    lead = int(np.flatnonzero(mags >= mags.max() - 1e-12)[0])
    return v * (abs(v[lead]) / v[lead])


def rephase(basis: np.ndarray, rho0: np.ndarray) -> tuple[np.ndarray, int]:
    """Propagate eigenvector phases breadth-first over the nonzero entries of rho0.

    Returns the rephased basis and the number of connected components of the
    graph whose edges are the entries with ``|<l|rho0|l'>| > EDGE_CUTOFF``.
    Every component is anchored at its lowest index, whose phase is kept.
    """
    v = np.array(basis, dtype=np.complex128)
    d = v.shape[1]
    seen = [False] * d
    components = 0
    for root in range(d):
        if seen[root]:
            continue
        components += 1
        seen[root] = True
        queue = deque([root])
        while queue:
            i = queue.popleft()
            row = v[:, i].conj() @ rho0 @ v
            for j in range(d):
                if seen[j] or abs(row[j]) <= EDGE_CUTOFF:
                    continue
                v[:, j] *= abs(row[j]) / row[j]
                seen[j] = True
                queue.append(j)
    return v, components


def fix_phases(projectors: Sequence, rho0) -> np.ndarray:
    """Eigenbasis of R in which every entry of ``rho0`` is real and nonnegative.

    ``projectors`` is the output of :func:`spectral_projectors` (pairs of
    eigenvalue and projector) or a bare sequence of rank-1 projectors.

    Raises
    ------
    PhaseInconsistency
        Some cycle of nonzero entries carries a non-real phase.
    NegativeEntry
        The entries can be made real but one of them is negative.
    """
    rho0 = as_matrix(rho0, copy=False)
    mats = [p[1] if isinstance(p, tuple) else p for p in projectors]
    if not mats:
        raise FamilyError("no projectors given")
    for p in mats:
        if abs(np.trace(p).real - 1.0) > PROJECTOR_CUTOFF:
            raise DegeneracyError("nondegeneracy: fix_phases needs rank-1 projectors")
    basis = np.column_stack([_unit_vector(np.asarray(p)) for p in mats])
    basis, _ = rephase(basis, rho0)
    m = basis.conj().T @ rho0 @ basis
    worst_imag = np.abs(m.imag).max()
    if worst_imag > 1e-9:
        raise PhaseInconsistency(
            "phase-consistency violated: rho0 cannot be made real in the eigenbasis "
            f"of R (residual imaginary part {worst_imag:.3e})"
        )
    if m.real.min() < -NEG_FLOOR:
        i, j = np.unravel_index(np.argmin(m.real), m.shape)
        raise NegativeEntry(
            "nonnegativity violated: <l|rho0|l'> is negative "
            f"({m.real[i, j]:.6g} at ({i}, {j})) in every real eigenbasis of R"
        )
    return cxmat._frozen(basis)


@dataclass(frozen=True)
class SymmetryOperator:
    matrix: np.ndarray
    n: int
    sign: int
    eigenvalues: np.ndarray
    eigenbasis: np.ndarray

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def power(self, k: int) -> np.ndarray:
        """R^k for any integer k (negative powers via the adjoint)."""
        base = self.matrix if k >= 0 else self.matrix.conj().T
        return np.linalg.matrix_power(base, abs(k))


def infer_sign(r, n: int) -> int:
    r = as_matrix(r, copy=False)
    rn = np.linalg.matrix_power(r, n)
    d = r.shape[0]
    res = {s: frobenius_norm(rn - s * np.eye(d)) for s in (1, -1)}
    sign = min(res, key=res.get)
    if res[sign] > STRUCT_TOL:
        raise OrderError(f"order violated: R^{n} is neither +1 nor -1 "
                         f"(residuals {res[1]:.3e}, {res[-1]:.3e})")
    return sign


@dataclass(frozen=True)
class SymmetricFamily:
    """The ensemble ``rho_k = R^k rho0 R^{dagger k}``, k = 0..n-1, equal priors.

    ``weight`` is the trace of ``rho0``; it is 1 for a stand-alone ensemble and
    the block share when the family is one block of a :class:`DirectSumProblem`.
    ``rho0_lambda`` holds rho0 in the phase-fixed eigenbasis (real, >= 0).
    """

    sym: SymmetryOperator
    rho0: np.ndarray
    n: int
    weight: float = 1.0
    rho0_lambda: np.ndarray = field(repr=False, default=None)
    phase_components: int = 1

    @property
    def prior(self) -> float:
        return 1.0 / self.n

    @property
    def dim(self) -> int:
        return self.rho0.shape[0]

    @property
    def basis(self) -> np.ndarray:
        return self.sym.eigenbasis

    @property
    def connected(self) -> bool:
        return self.phase_components == 1

    def to_lambda(self, a) -> np.ndarray:
        v = self.basis
        return v.conj().T @ np.asarray(a) @ v

    def from_lambda(self, a) -> np.ndarray:
        v = self.basis
        return v @ np.asarray(a) @ v.conj().T


def make_family(r, rho0, n: int, sign: int | None = None,
                weight: float = 1.0) -> SymmetricFamily:
    """Validate ``(R, rho0, n, sign)`` and build a :class:`SymmetricFamily`.

    Checks run in a fixed order (unitarity, order, dimension, nondegeneracy,
    Hermiticity, trace, positivity, phase consistency, nonnegativity) and the
    first failure is raised.
    """
    r = as_matrix(r)
    rho0 = as_matrix(rho0)
    if r.shape != rho0.shape:
        raise FamilyError(f"dimension: R is {r.shape} but rho0 is {rho0.shape}",
                          "dimension")
    if r.shape[0] != r.shape[1]:
        raise UnitarityError(f"unitarity: R must be square, got {r.shape}")
    unit_res = frobenius_norm(r @ r.conj().T - np.eye(r.shape[0]))
    if unit_res > STRUCT_TOL:
        raise UnitarityError(f"unitarity violated: ||R R^dagger - 1||_F = {unit_res:.3e}")
    if sign is None:
        sign = infer_sign(r, n)
    d = r.shape[0]
    if d > n:
        raise FamilyError(f"dimension: d = {d} exceeds N = {n}; R must be degenerate",
                          "dimension")
    pairs = spectral_projectors(r, n, sign)
    if len(pairs) != d:
        raise DegeneracyError("nondegeneracy violated: fewer eigenvalues than dimension")

    if not cxmat.is_hermitian(rho0, STRUCT_TOL):
        raise FamilyError("hermiticity violated: rho0 is not Hermitian", "hermiticity")
    tr = np.trace(rho0).real
    if abs(tr - weight) > STRUCT_TOL:
        raise FamilyError(f"trace violated: tr(rho0) = {tr:.12g}, expected {weight:.12g}",
                          "trace")
    if not cxmat.is_psd(rho0, NEG_FLOOR):
        raise FamilyError("positivity violated: rho0 has a negative eigenvalue",
                          "positivity")

    basis = fix_phases(pairs, rho0)
    _, components = rephase(basis, rho0)
    m = (basis.conj().T @ rho0 @ basis).real
    m[(m < 0) & (m > -NEG_FLOOR)] = 0.0
    m.setflags(write=False)

    evals = np.array([b for b, _ in pairs])
    evals.setflags(write=False)
    sym = SymmetryOperator(r, n, sign, evals, basis)
    return SymmetricFamily(sym, rho0, n, float(weight), m, components)


def generate_states(family: SymmetricFamily) -> list[np.ndarray]:
    """[rho0, R rho0 R^dag, ..., R^{N-1} rho0 R^{dag (N-1)}]."""
    r = family.sym.matrix
    states = [family.rho0]
    for _ in range(family.n - 1):
        nxt = cxmat._frozen(r @ states[-1] @ r.conj().T)
        states.append(nxt)
    return states


@dataclass(frozen=True)
class DirectSumProblem:
    """A reducible ensemble given as a direct sum of irreducible blocks."""

    blocks: tuple[SymmetricFamily, ...]

    def __post_init__(self):
        if not self.blocks:
            raise FamilyError("a direct-sum problem needs at least one block", "blocks")
        object.__setattr__(self, "blocks", tuple(self.blocks))
        ns = {b.n for b in self.blocks}
        if len(ns) != 1:
            raise FamilyError(f"blocks disagree on N: {sorted(ns)}", "blocks")
        total = sum(self.block_traces)
        if abs(total - 1.0) > STRUCT_TOL:
            raise FamilyError(f"trace violated: block traces sum to {total:.12g}", "trace")

    @property
    def n(self) -> int:
        return self.blocks[0].n

    @property
    def block_traces(self) -> list[float]:
        return [float(np.trace(b.rho0).real) for b in self.blocks]

    @property
    def dim(self) -> int:
        return sum(b.dim for b in self.blocks)


def as_problem(problem) -> DirectSumProblem:
    if isinstance(problem, DirectSumProblem):
        return problem
    if isinstance(problem, SymmetricFamily):
        return DirectSumProblem((problem,))
    raise TypeError(f"expected SymmetricFamily or DirectSumProblem, got {type(problem)!r}")


def haar_unitary(d: int, rng: np.random.Generator) -> np.ndarray:
    z = (rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def random_family(dim: int, n: int, sign: int = 1, seed: int = 0) -> SymmetricFamily:
    """Random valid family, disguised by a random change of basis.

    The eigenvalues are ``dim`` distinct roots of ``sign`` drawn without
    replacement; rho0 is ``A A^T / tr`` for a uniform[0,1] matrix ``A``, which
    is PSD with nonnegative entries in the eigenbasis.
    """
    if not 1 <= dim <= n:
        raise ValueError(f"need 1 <= dim <= n, got dim={dim}, n={n}")
    rng = np.random.default_rng(seed)
    roots = candidate_eigenvalues(n, sign)
    picked = roots[np.sort(rng.choice(n, size=dim, replace=False))]
    a = rng.uniform(0.0, 1.0, size=(dim, dim))
    m = a @ a.T
    m /= np.trace(m)
    u = haar_unitary(dim, rng)
    r = u @ np.diag(picked) @ u.conj().T
    rho0 = u @ m @ u.conj().T
    rho0 = 0.5 * (rho0 + rho0.conj().T)
    return make_family(r, rho0, n, sign)
