"""Optimal measurement for symmetric mixed-state ensembles.

Given a family whose seed state is real and nonnegative in the eigenbasis
``{|l>}`` of the symmetry operator, the minimum-error POM is

    pi_k = R^k Phi2 |phi0><phi0| Phi2 R^{dagger k},
    Phi2 = sum_l c_l |l><l|,   c_l = N^{-1/2} / <l|phi0>,

for any ``phi0`` with real nonzero overlaps.  Because ``Phi2 |phi0>`` is
``N^{-1/2} sum_l |l>`` whatever ``phi0`` is, ``pi_0`` always has every entry
equal to ``1/N`` in the eigenbasis; that is the canonical construction used by
default.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import cxmat
from .cxmat import frobenius_norm
from .symstates import (DirectSumProblem, SymmetricFamily, as_problem,
                        generate_states)

CANONICAL = "canonical"
UNIFORM = "uniform"

PAIRWISE_TOL = 1e-8
GLOBAL_TOL = 1e-8
COMPLETENESS_TOL = 1e-9
POSITIVITY_FLOOR = 1e-10
HERMITIAN_TOL = 1e-9
OVERLAP_MIN = 1e-8


class Phi0Error(ValueError):
    """phi0 violates the overlap preconditions."""


class ConditionError(ArithmeticError):
    """A structural identity the construction guarantees has failed."""


@dataclass(frozen=True)
class Pom:
    elements: tuple[np.ndarray, ...]

    def __post_init__(self):
        object.__setattr__(self, "elements", tuple(cxmat.as_matrix(e) for e in self.elements))

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, k):
        return self.elements[k]

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def completeness_residual(self) -> float:
        return frobenius_norm(sum(self.elements) - np.eye(self.dim))

    def positivity_min(self) -> float:
        """Smallest eigenvalue over all elements."""
        return min(cxmat.min_eigenvalue(e) for e in self.elements)


@dataclass(frozen=True)
class Phi2Operator:
    matrix: np.ndarray
    coefficients: np.ndarray


def overlaps(family: SymmetricFamily, phi0) -> np.ndarray:
    """Real overlaps <l|phi0>, after removing the global phase of phi0.

    A global phase of ``phi0`` leaves ``|phi0><phi0|`` unchanged, and the
    eigenbasis itself is only fixed up to a global phase, so the phase of the
    first overlap is divided out before testing the others for reality.
    """
    phi0 = np.asarray(phi0, dtype=np.complex128).reshape(-1)
    if phi0.shape[0] != family.dim:
        raise Phi0Error(f"phi0 has length {phi0.shape[0]}, expected {family.dim}")
    norm = np.linalg.norm(phi0)
    if abs(norm - 1.0) > 1e-9:
        raise Phi0Error(f"phi0 must be normalized (norm {norm:.12g})")
    o = family.basis.conj().T @ phi0
    if np.abs(o).min() <= OVERLAP_MIN:
        raise Phi0Error("phi0 has a vanishing overlap with an eigenvector of R")
    o = o * (abs(o[0]) / o[0])
    if np.abs(o.imag).max() > 1e-9:
        raise Phi0Error("phi0 overlaps with the eigenbasis are not real "
                        f"(max imaginary part {np.abs(o.imag).max():.3e})")
    return o.real


def uniform_phi0(family: SymmetricFamily) -> np.ndarray:
    """(1/sqrt(d)) sum_l |l>."""
    return family.basis.sum(axis=1) / np.sqrt(family.dim)


def _resolve_phi0(family, phi0):
    if phi0 is None or (isinstance(phi0, str) and phi0 == UNIFORM):
        return uniform_phi0(family)
    return phi0


def _orbit(family: SymmetricFamily, op: np.ndarray) -> list[np.ndarray]:
    r = family.sym.matrix
    out = [cxmat._frozen(op)]
    for _ in range(family.n - 1):
        out.append(cxmat._frozen(r @ out[-1] @ r.conj().T))
    return out


def build_phi(family: SymmetricFamily, phi0=None) -> np.ndarray:
    """Phi = sum_k R^k |phi0><phi0| R^{dagger k}."""
    phi0 = _resolve_phi0(family, phi0)
    overlaps(family, phi0)
    v = np.asarray(phi0, dtype=np.complex128).reshape(-1, 1)
    return cxmat._frozen(sum(_orbit(family, v @ v.conj().T)))


def build_phi2(family: SymmetricFamily, phi0=None) -> Phi2Operator:
    phi0 = _resolve_phi0(family, phi0)
    o = overlaps(family, phi0)
    c = 1.0 / (np.sqrt(family.n) * o)
    v = family.basis
    # the sign convention of c follows the phase-stripped phi0
    m = cxmat._frozen((v * c) @ v.conj().T)
    c.setflags(write=False)
    return Phi2Operator(m, c)


def canonical_pi0(family: SymmetricFamily) -> np.ndarray:
    v = family.basis
    s = v.sum(axis=1, keepdims=True)
    return cxmat._frozen(s @ s.conj().T / family.n)


def build_pom(family: SymmetricFamily, phi0=CANONICAL) -> Pom:
    """Minimum-error POM for ``family``.

    ``phi0`` is either :data:`CANONICAL` (default), :data:`UNIFORM`, or a unit
    vector in the standard basis whose overlaps with the eigenbasis are real
    and nonzero up to a global phase.
    """
    if isinstance(phi0, str) and phi0 == CANONICAL:
        pi0 = canonical_pi0(family)
    else:
        phi0 = _resolve_phi0(family, phi0)
        phi2 = build_phi2(family, phi0).matrix
        vec = np.asarray(phi0, dtype=np.complex128).reshape(-1)
        # use the phase-stripped phi0 so that Phi2 |phi0> is phase-free
        o = family.basis.conj().T @ vec
        vec = vec * (abs(o[0]) / o[0])
        w = (phi2 @ vec).reshape(-1, 1)
        pi0 = w @ w.conj().T
    return Pom(tuple(_orbit(family, pi0)))


def sqrt_measurement_equivalence(family: SymmetricFamily, phi0=None) -> bool:
    """Whether Phi2 coincides with the principal inverse square root of Phi."""
    phi0 = _resolve_phi0(family, phi0)
    o = overlaps(family, phi0)
    if np.any(o <= 0):
        raise Phi0Error("square-root equivalence requires strictly positive overlaps")
    phi2 = build_phi2(family, phi0).matrix
    inv_sqrt = cxmat.inverse_sqrt(build_phi(family, phi0))
    return frobenius_norm(phi2 - inv_sqrt) <= 1e-8


# condition checks on explicit (states, priors, elements)

def correct_probability(states: Sequence, elements: Sequence, priors: Sequence) -> float:
    """sum_k p_k tr(pi_k rho_k)."""
    if len(states) != len(elements):
        raise ValueError(f"{len(elements)} POM elements for {len(states)} states")
    total = 0.0
    for p, rho, pi in zip(priors, states, elements):
        if rho.shape != pi.shape:
            raise cxmat.MatrixError(f"dimension mismatch: {pi.shape} vs {rho.shape}")
        total += p * np.trace(pi @ rho).real
    return float(total)


def pairwise_residual(states, elements, priors) -> float:
    """max_{j,k} ||pi_k (p_k rho_k - p_j rho_j) pi_j||_F."""
    worst = 0.0
    n = len(states)
    for k in range(n):
        for j in range(n):
            if j == k:
                continue
            op = elements[k] @ (priors[k] * states[k] - priors[j] * states[j]) @ elements[j]
            worst = max(worst, frobenius_norm(op))
    return worst


def lagrange_hermiticity(states, elements, priors) -> float:
    """||G - G^dagger||_F for G = sum_k p_k pi_k rho_k."""
    return cxmat.hermiticity_residual(
        sum(p * pi @ rho for p, pi, rho in zip(priors, elements, states)))


def lagrange_operator(states, elements, priors, strict: bool = True) -> np.ndarray:
    """sum_k p_k pi_k rho_k, checked for Hermiticity.

    With ``strict=False`` a non-Hermitian sum is not an error and its
    Hermitian part is returned.
    """
    op = sum(p * pi @ rho for p, pi, rho in zip(priors, elements, states))
    skew = cxmat.hermiticity_residual(op)
    if strict and skew > HERMITIAN_TOL * max(frobenius_norm(op), 1.0):
        raise ConditionError(
            f"sum_k p_k pi_k rho_k is not Hermitian (residual {skew:.3e}); POM is broken"
        )
    return 0.5 * (op + op.conj().T)


def global_min_eigenvalue(states, elements, priors, strict: bool = True) -> float:
    """min_j lambda_min(sum_k p_k pi_k rho_k - p_j rho_j)."""
    g = lagrange_operator(states, elements, priors, strict)
    worst = np.inf
    for p, rho in zip(priors, states):
        a = g - p * rho
        a = 0.5 * (a + a.conj().T)
        worst = min(worst, cxmat.min_eigenvalue(a))
    return float(worst)


def _priors(family: SymmetricFamily) -> list[float]:
    return [family.prior] * family.n


def _check_dims(family: SymmetricFamily, pom: Pom) -> None:
    if len(pom) != family.n or pom.dim != family.dim:
        raise cxmat.MatrixError(
            f"POM has {len(pom)} elements of dim {pom.dim}; family needs "
            f"{family.n} of dim {family.dim}"
        )


def error_probability(family: SymmetricFamily, pom: Pom) -> float:
    """1 - sum_k (1/N) tr(pi_k rho_k)."""
    _check_dims(family, pom)
    return 1.0 - correct_probability(generate_states(family), pom.elements, _priors(family))


def check_pairwise_condition(family: SymmetricFamily, pom: Pom) -> float:
    _check_dims(family, pom)
    return pairwise_residual(generate_states(family), pom.elements, _priors(family))


def check_global_condition(family: SymmetricFamily, pom: Pom) -> float:
    _check_dims(family, pom)
    return global_min_eigenvalue(generate_states(family), pom.elements, _priors(family))


@dataclass(frozen=True)
class BlockReport:
    dim: int
    trace: float
    correct_probability: float
    pairwise_residual: float
    global_min_eigenvalue: float
    pom_positivity_min: float
    completeness_residual: float
    phase_graph_connected: bool
    hermiticity_residual: float = 0.0


@dataclass(frozen=True)
class OptimalityReport:
    """Error probability and raw residuals of the optimality conditions.

    The aggregate residuals are computed on the full (direct-sum) space.
    ``tol_scale`` multiplies every threshold; any value other than 1 makes the
    report non-certifying, so ``optimal`` is then always False.
    """

    p_error: float
    pairwise_residual: float
    global_min_eigenvalue: float
    pom_positivity_min: float
    completeness_residual: float
    blocks: tuple[BlockReport, ...] = ()
    hermiticity_residual: float = 0.0
    tol_scale: float = 1.0
    phase_graph_connected: bool = True
    optimal: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "optimal", self.conditions_met() and self.certifying)

    @property
    def certifying(self) -> bool:
        return self.tol_scale == 1.0

    def conditions_met(self) -> bool:
        s = self.tol_scale
        return (self.pairwise_residual <= PAIRWISE_TOL * s
                and self.global_min_eigenvalue >= -GLOBAL_TOL * s
                and self.completeness_residual <= COMPLETENESS_TOL * s
                and self.pom_positivity_min >= -POSITIVITY_FLOOR * s
                and self.hermiticity_residual <= HERMITIAN_TOL * s)


def full_space(problem: DirectSumProblem, poms: Sequence[Pom]):
    """Assemble per-block states and POMs into direct sums on the full space."""
    states_b = [generate_states(b) for b in problem.blocks]
    n = problem.n
    states = [cxmat.direct_sum([s[k] for s in states_b]) for k in range(n)]
    elements = [cxmat.direct_sum([p[k] for p in poms]) for k in range(n)]
    return states, elements


def evaluate(problem, poms: Sequence[Pom], tol_scale: float = 1.0) -> OptimalityReport:
    """Optimality report for given per-block POMs (constructed or injected)."""
    problem = as_problem(problem)
    if len(poms) != len(problem.blocks):
        raise ValueError(f"{len(poms)} POMs for {len(problem.blocks)} blocks")
    priors = [1.0 / problem.n] * problem.n

    block_reports = []
    for fam, pom in zip(problem.blocks, poms):
        _check_dims(fam, pom)
        st = generate_states(fam)
        block_reports.append(BlockReport(
            dim=fam.dim,
            trace=float(np.trace(fam.rho0).real),
            correct_probability=correct_probability(st, pom.elements, priors),
            pairwise_residual=pairwise_residual(st, pom.elements, priors),
            global_min_eigenvalue=global_min_eigenvalue(st, pom.elements, priors, False),
            pom_positivity_min=pom.positivity_min(),
            completeness_residual=pom.completeness_residual(),
            phase_graph_connected=fam.connected,
            hermiticity_residual=lagrange_hermiticity(st, pom.elements, priors),
        ))

    states, elements = full_space(problem, poms)
    full = Pom(tuple(elements))
    # per-block contributions summed in block order; no reordering
    p_correct = sum(b.correct_probability for b in block_reports)
    return OptimalityReport(
        p_error=1.0 - p_correct,
        pairwise_residual=pairwise_residual(states, elements, priors),
        global_min_eigenvalue=global_min_eigenvalue(states, elements, priors, False),
        pom_positivity_min=full.positivity_min(),
        completeness_residual=full.completeness_residual(),
        blocks=tuple(block_reports),
        hermiticity_residual=lagrange_hermiticity(states, elements, priors),
        tol_scale=tol_scale,
        phase_graph_connected=all(b.phase_graph_connected for b in block_reports),
    )


def solve(problem, phi0=CANONICAL, tol_scale: float = 1.0) -> tuple[list[Pom], OptimalityReport]:
    """Construct the POM for every block and report on it.

    ``phi0`` applies to single-block problems only; direct sums always use the
    canonical construction.
    """
    problem = as_problem(problem)
    if len(problem.blocks) == 1:
        poms = [build_pom(problem.blocks[0], phi0)]
    else:
        poms = [build_pom(b, CANONICAL) for b in problem.blocks]
    return poms, evaluate(problem, poms, tol_scale)
