"""Dense complex matrix kernel.

Matrices are plain ``numpy`` complex128 arrays, returned read-only so that a
value handed out by one routine can never be mutated under another.  The
Hermitian eigensolver is a cyclic complex Jacobi iteration; it is adequate for
the small operators (d <= 64) this package deals with.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

MAX_DIM = 64

#: off-diagonal magnitude (relative to ||A||_F) at which Jacobi stops
JACOBI_TOL = 1e-13
MAX_SWEEPS = 100


class MatrixError(ValueError):
    """Invalid matrix input (shape, finiteness, size)."""


class NotHermitianError(MatrixError):
    pass


class ConvergenceError(ArithmeticError):
    pass


def as_matrix(a, copy: bool = True) -> np.ndarray:
    """Coerce ``a`` to a finite complex128 2-D array.

    The result is read-only unless it is the caller's own array (possible
    with ``copy=False``), whose flags are left alone.
    """
    m = np.array(a, dtype=np.complex128) if copy else np.asarray(a, dtype=np.complex128)
    if m.ndim == 1:
        m = m.reshape(-1, 1)
    if m.ndim != 2 or m.shape[0] == 0 or m.shape[1] == 0:
        raise MatrixError(f"expected a non-empty 2-D matrix, got shape {m.shape}")
    if max(m.shape) > MAX_DIM:
        raise MatrixError(f"dimension {m.shape} exceeds the supported maximum {MAX_DIM}")
    if not np.all(np.isfinite(m)):
        raise MatrixError("matrix contains NaN or Inf entries")
    if m is not a and m.base is not a:
        m.setflags(write=False)
    return m


def _frozen(m: np.ndarray) -> np.ndarray:
    m = np.ascontiguousarray(m, dtype=np.complex128)
    m.setflags(write=False)
    return m


def _require_square(a: np.ndarray, what: str = "matrix") -> None:
    if a.shape[0] != a.shape[1]:
        raise MatrixError(f"{what} must be square, got shape {a.shape}")


def eye(d: int) -> np.ndarray:
    return _frozen(np.eye(d, dtype=np.complex128))


def matmul(a, b) -> np.ndarray:
    a, b = as_matrix(a, copy=False), as_matrix(b, copy=False)
    if a.shape[1] != b.shape[0]:
        raise MatrixError(f"dimension mismatch: {a.shape} x {b.shape}")
    return _frozen(a @ b)


def adjoint(a) -> np.ndarray:
    return _frozen(as_matrix(a, copy=False).conj().T)


def trace(a) -> complex:
    a = as_matrix(a, copy=False)
    _require_square(a)
    return complex(np.trace(a))


def tensor(a, b) -> np.ndarray:
    return _frozen(np.kron(as_matrix(a, copy=False), as_matrix(b, copy=False)))


def direct_sum(blocks: Sequence) -> np.ndarray:
    blocks = [as_matrix(b, copy=False) for b in blocks]
    if not blocks:
        raise MatrixError("direct_sum needs at least one block")
    for b in blocks:
        _require_square(b, "direct_sum block")
    d = sum(b.shape[0] for b in blocks)
    if d > MAX_DIM:
        raise MatrixError(f"direct sum dimension {d} exceeds {MAX_DIM}")
    out = np.zeros((d, d), dtype=np.complex128)
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return _frozen(out)


def frobenius_norm(a) -> float:
    a = np.asarray(a, dtype=np.complex128)
    return float(np.sqrt(np.sum(a.real ** 2 + a.imag ** 2)))


def hermiticity_residual(a) -> float:
    """||A - A^dagger||_F."""
    a = np.asarray(a, dtype=np.complex128)
    return frobenius_norm(a - a.conj().T)


def is_hermitian(a, tol: float = 1e-9) -> bool:
    a = as_matrix(a, copy=False)
    if a.shape[0] != a.shape[1]:
        return False
    return hermiticity_residual(a) <= tol * max(frobenius_norm(a), 1.0)


@dataclass(frozen=True)
class HermitianEigenResult:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reassemble(self) -> np.ndarray:
        v = self.eigenvectors
        return _frozen((v * self.eigenvalues) @ v.conj().T)


def hermitian_eig(a, tol: float = 1e-9) -> HermitianEigenResult:
    """Spectral decomposition of a Hermitian matrix by cyclic complex Jacobi.

    Each rotation first removes the phase of the pivot ``a[p, q]`` with a
    diagonal unitary, then annihilates the (now real) pivot with a real plane
    rotation.  Sweeps continue until every off-diagonal magnitude is at most
    ``JACOBI_TOL * ||A||_F``.

    Parameters
    ----------
    a : array_like
        Square matrix, Hermitian up to ``||A - A^dagger||_F <= tol * ||A||_F``.
    tol : float
        Hermiticity tolerance.

    Returns
    -------
    HermitianEigenResult
        Ascending eigenvalues and the matching orthonormal eigenvector columns.
    """
    a = as_matrix(a, copy=False)
    _require_square(a)
    norm = frobenius_norm(a)
    skew = hermiticity_residual(a)
    if skew > tol * norm and skew > 1e-15:
        raise NotHermitianError(
            f"matrix is not Hermitian: ||A - A^dagger||_F = {skew:.3e}"
        )
    d = a.shape[0]
    w = 0.5 * (a + a.conj().T)
    v = np.eye(d, dtype=np.complex128)
    threshold = JACOBI_TOL * norm

    for _sweep in range(MAX_SWEEPS + 1):
        off = np.abs(w - np.diag(np.diag(w)))
        if d == 1 or off.max() <= threshold:
            break
        if _sweep == MAX_SWEEPS:
            raise ConvergenceError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps")
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = w[p, q]
                r = abs(apq)
                if r <= 0.1 * threshold:
                    continue
                phase = apq / r
                app, aqq = w[p, p].real, w[q, q].real
                theta = (aqq - app) / (2.0 * r)
                t = np.copysign(1.0, theta) / (abs(theta) + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                u = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]])
                idx = [p, q]
                w[:, idx] = w[:, idx] @ u
                w[idx, :] = u.conj().T @ w[idx, :]
                w[p, q] = w[q, p] = 0.0
                w[p, p] = w[p, p].real
                w[q, q] = w[q, q].real
                v[:, idx] = v[:, idx] @ u

    evals = np.real(np.diag(w)).copy()
    order = np.argsort(evals, kind="stable")
    evals = evals[order]
    evals.setflags(write=False)
    return HermitianEigenResult(evals, _frozen(v[:, order]))


def min_eigenvalue(a, tol: float = 1e-9) -> float:
    return float(hermitian_eig(a, tol).eigenvalues[0])


def psd_floor(a) -> float:
    """Default PSD tolerance: 1e-10 * ||A||_F, or 1e-12 for near-zero A."""
    norm = frobenius_norm(a)
    return 1e-12 if norm < 1e-2 else 1e-10 * norm


def is_psd(a, floor: float | None = None) -> bool:
    a = as_matrix(a, copy=False)
    _require_square(a)
    if not is_hermitian(a, 1e-9):
        raise NotHermitianError("is_psd requires a Hermitian matrix")
    if floor is None:
        floor = psd_floor(a)
    return min_eigenvalue(a) >= -floor


def inverse_sqrt(a, tol: float = 1e-9) -> np.ndarray:
    """Principal inverse square root of a positive-definite Hermitian matrix."""
    res = hermitian_eig(a, tol)
    if res.eigenvalues[0] <= 0:
        raise MatrixError("inverse square root needs a positive-definite matrix")
    v = res.eigenvectors
    return _frozen((v / np.sqrt(res.eigenvalues)) @ v.conj().T)


def matrix_power(a, k: int) -> np.ndarray:
    a = as_matrix(a, copy=False)
    _require_square(a)
    return _frozen(np.linalg.matrix_power(a, k))
