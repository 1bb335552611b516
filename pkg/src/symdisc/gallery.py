"""Worked example ensembles: symmetric pure qubit states, a mixed qubit trine
ensemble, and a two-qubit trine ensemble that splits into spin-1 and spin-0
blocks."""

from __future__ import annotations

import numpy as np

from .symstates import DirectSumProblem, SymmetricFamily, infer_sign, make_family

GALLERY_IDS = ("ex1", "ex2", "ex3")

SQ2 = np.sqrt(2.0)
SQ6 = np.sqrt(6.0)


class GalleryError(ValueError):
    pass


def rotation(theta: float) -> np.ndarray:
    """Spin-1/2 rotation about the 2-axis by ``theta``: [[c, -s], [s, c]] at theta/2."""
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=np.complex128)


def spin1_rotation(theta: float) -> np.ndarray:
    c2, s2 = np.cos(theta / 2) ** 2, np.sin(theta / 2) ** 2
    st = np.sin(theta) / SQ2
    return np.array([[c2, st, s2],
                     [-st, np.cos(theta), st],
                     [s2, -st, c2]], dtype=np.complex128)


# Reference matrices for the two-qubit trine ensemble (spin-1 block).
EX3_RHO0_SPIN1 = np.array([[1, 0, -3], [0, 0, 0], [-3, 0, 9]], dtype=np.complex128) / 16
EX3_R_SPIN1 = spin1_rotation(2 * np.pi / 3)
EX3_SPIN0_WEIGHT = 3 / 8
EX3_PHI0 = np.array([0, 0, 1], dtype=np.complex128)
EX3_PHI2 = np.array([[1 + SQ2, 0, 1 - SQ2],
                     [0, 2 * SQ2, 0],
                     [1 - SQ2, 0, 1 + SQ2]], dtype=np.complex128) / SQ6
EX3_PI0_SPIN1 = np.array([[3 - 2 * SQ2, 0, -1],
                          [0, 0, 0],
                          [-1, 0, 3 + 2 * SQ2]], dtype=np.complex128) / 6
EX3_P_ERROR = (3 - SQ2) / 6

for _m in (EX3_RHO0_SPIN1, EX3_R_SPIN1, EX3_PHI2, EX3_PI0_SPIN1):
    _m.setflags(write=False)


def build_ex1(n: int) -> SymmetricFamily:
    """N pure qubit states |Psi_k> = R(2 pi/N)^k (1, 0)."""
    if n < 2:
        raise GalleryError(f"ex1 needs n >= 2, got {n}")
    r = rotation(2 * np.pi / n)
    psi0 = np.array([1, 0], dtype=np.complex128)
    rho0 = np.outer(psi0, psi0.conj())
    return make_family(r, rho0, n, infer_sign(r, n))


def build_ex2() -> SymmetricFamily:
    r = rotation(2 * np.pi / 3)
    rho0 = np.diag([1 / 3, 2 / 3]).astype(np.complex128)
    return make_family(r, rho0, 3, -1)


def trine_states() -> list[np.ndarray]:
    """(1, 0), (1/2, sqrt3/2), (1/2, -sqrt3/2)."""
    h = np.sqrt(3) / 2
    return [np.array(v, dtype=np.complex128) for v in ([1, 0], [0.5, h], [0.5, -h])]


def coupling_basis() -> np.ndarray:
    """Columns |1,1>, |1,0>, |1,-1>, |0,0> in the two-qubit product basis.

    |1,0> carries a minus sign, -(|01> + |10>)/sqrt2; with the opposite sign
    the spin-1 block of R (x) R comes out as the transpose of the reference R3.
    """
    s = 1 / SQ2
    return np.array([[1, 0, 0, 0],
                     [0, -s, 0, s],
                     [0, -s, 0, -s],
                     [0, 0, 1, 0]], dtype=np.complex128)


def ex3_two_qubit_states() -> list[np.ndarray]:
    """rho_k = (|a><a| (x) |b><b| + |b><b| (x) |a><a|) / 2 over the other two trines."""
    t = trine_states()
    out = []
    for k in range(3):
        a, b = t[(k + 1) % 3], t[(k + 2) % 3]
        ab, ba = np.kron(a, b), np.kron(b, a)
        out.append(0.5 * (np.outer(ab, ab.conj()) + np.outer(ba, ba.conj())))
    return out


def build_ex3(tol: float = 1e-10) -> DirectSumProblem:
    """Two-qubit trine ensemble as spin-1 (+) spin-0 blocks.

    The blocks are computed from the product-space construction and checked
    against the reference matrices; a mismatch means the coupling basis
    convention is wrong and raises :class:`GalleryError`.
    """
    u = coupling_basis()
    r2 = rotation(2 * np.pi / 3)
    rr = u.conj().T @ np.kron(r2, r2) @ u
    rho0 = u.conj().T @ ex3_two_qubit_states()[0] @ u

    if np.abs(rr[:3, 3]).max() > tol or np.abs(rho0[:3, 3]).max() > tol:
        raise GalleryError("coupling basis does not block-diagonalize the ensemble")
    if np.abs(rr[:3, :3] - EX3_R_SPIN1).max() > tol:
        raise GalleryError("spin-1 block of R (x) R does not match the reference R3")
    if np.abs(rho0[:3, :3] - EX3_RHO0_SPIN1).max() > tol:
        raise GalleryError("spin-1 block of rho0 does not match the reference matrix")
    if abs(rho0[3, 3] - EX3_SPIN0_WEIGHT) > tol or abs(rr[3, 3] - 1) > tol:
        raise GalleryError("spin-0 block does not match the reference weight 3/8")

    spin1 = make_family(EX3_R_SPIN1, EX3_RHO0_SPIN1, 3, 1, weight=5 / 8)
    spin0 = make_family(np.eye(1), [[EX3_SPIN0_WEIGHT]], 3, 1, weight=EX3_SPIN0_WEIGHT)
    return DirectSumProblem((spin1, spin0))


def build(gallery_id: str, n: int | None = None):
    """Dispatch on ``ex1`` / ``ex2`` / ``ex3``; ``n`` is used by ex1 only (default 3)."""
    gid = gallery_id.lower()
    if gid == "ex1":
        return build_ex1(3 if n is None else n)
    if gid == "ex2":
        return build_ex2()
    if gid == "ex3":
        return build_ex3()
    raise GalleryError(f"unknown gallery id {gallery_id!r}; expected one of {GALLERY_IDS}")
