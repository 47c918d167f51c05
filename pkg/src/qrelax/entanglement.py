"""Two-qubit entanglement: entropy of entanglement, concurrence, EoF.

All entropies are in base 2, so one EPR pair carries exactly one ebit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidStateError
from .operators import PAULI_Y, check_density_matrix, ket_to_density, partial_trace

EIGEN_CLAMP = 1e-12
_YY = np.kron(PAULI_Y, PAULI_Y)


def binary_entropy(p: float) -> float:
    if p <= 0.0 or p >= 1.0:
        return 0.0
    return float(-p * np.log2(p) - (1 - p) * np.log2(1 - p))


def von_neumann_entropy(rho) -> float:
    w = np.linalg.eigvalsh(np.asarray(rho, dtype=complex))
    w = w[w > EIGEN_CLAMP]
    return float(-np.sum(w * np.log2(w)))


def pure_state_entanglement(psi, dims=(2, 2)) -> float:
    """Entropy of the reduced state, ``-Tr(rho_1 log2 rho_1)``."""
    psi = np.asarray(psi, dtype=complex).ravel()
    if abs(np.linalg.norm(psi) - 1.0) > 1e-10:
        raise InvalidStateError(f"state vector has norm {np.linalg.norm(psi):.12g}")
    return von_neumann_entropy(partial_trace(ket_to_density(psi), 0, dims))


def spin_flip(rho) -> np.ndarray:
    """``(Y x Y) rho* (Y x Y)``."""
    return _YY @ np.conj(rho) @ _YY


def _check_two_qubit(rho) -> np.ndarray:
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise InvalidStateError(f"expected a 4x4 two-qubit density matrix, got shape {rho.shape}")
    return check_density_matrix(rho, 1e-9)


def spin_flip_eigenvalues(rho) -> np.ndarray:
    """Square roots of the eigenvalues of ``rho rho~``, in decreasing order."""
    rho = _check_two_qubit(rho)
    w = np.linalg.eigvals(rho @ spin_flip(rho)).real
    w = np.where(w < EIGEN_CLAMP, 0.0, w)
    return np.sort(np.sqrt(w))[::-1]


def concurrence(rho) -> float:
    lam = spin_flip_eigenvalues(rho)
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))


def eof_from_concurrence(c: float) -> float:
    """Closed-form entanglement of formation ``h((1 + sqrt(1 - C^2)) / 2)``."""
    c = min(max(float(c), 0.0), 1.0)
    return binary_entropy((1.0 + np.sqrt(1.0 - c * c)) / 2.0)


@dataclass(frozen=True)
class EntanglementReport:
    concurrence: float
    eof: float
    spin_flip_eigenvalues: tuple


def entanglement_of_formation(rho) -> EntanglementReport:
    lam = spin_flip_eigenvalues(rho)
    c = float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
    return EntanglementReport(c, eof_from_concurrence(c), tuple(float(x) for x in lam))
