import numpy as np
import pytest

from symdisc.symstates import candidate_eigenvalues, haar_unitary

ACCEPTANCE_LINES: list[str] = []


def disguised(rho_lambda, n, sign=1, seed=0, roots=None):
    """(R, rho0) whose eigenbasis representation of rho0 is ``rho_lambda``."""
    rho_lambda = np.asarray(rho_lambda, dtype=np.complex128)
    d = rho_lambda.shape[0]
    rng = np.random.default_rng(seed)
    if roots is None:
        roots = candidate_eigenvalues(n, sign)[:d]
    u = haar_unitary(d, rng)
    r = u @ np.diag(roots) @ u.conj().T
    rho0 = u @ rho_lambda @ u.conj().T
    return r, 0.5 * (rho0 + rho0.conj().T)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
