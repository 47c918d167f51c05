import numpy as np
import pytest
from scipy.linalg import expm


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def liouvillian(h, dissipators):
    """Column-stacking superoperator of the master equation, built from Kronecker identities.

    vec(A X B) = (B^T kron A) vec(X); independent of the trace-projection route.
    """
    n = h.shape[0]
    eye = np.eye(n)
    sup = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
    for L in dissipators:
        LdL = L.conj().T @ L
        sup += np.kron(L.conj(), L) - 0.5 * np.kron(eye, LdL) - 0.5 * np.kron(LdL.T, eye)
    return sup


def vec(m):
    return np.asarray(m).reshape(-1, order="F")


def unvec(v, n):
    return np.asarray(v).reshape(n, n, order="F")


def evolve_density(h, dissipators, rho0, t):
    n = rho0.shape[0]
    return unvec(expm(liouvillian(h, dissipators) * t) @ vec(rho0), n)


def steady_state_by_nullspace(h, dissipators):
    n = h.shape[0]
    _, s, vh = np.linalg.svd(liouvillian(h, dissipators))
    rho = unvec(vh[-1].conj(), n)
    return rho / np.trace(rho)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)
