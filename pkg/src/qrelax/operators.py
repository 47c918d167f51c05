"""Dense operator primitives and the Pauli-string coherence-vector basis.

Density matrices of ``n`` qubits (``N = 2**n``) are expanded as

    rho = (1 + sum_a r_a P_a) / N,     r_a = Tr(P_a rho)

where ``P_a`` runs over the ``4**n - 1`` non-identity Pauli strings.  The
strings are unnormalized, ``Tr(P_a P_b) = N delta_ab``, so for one qubit
``r`` is the usual Bloch vector.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidStateError

MAX_QUBITS = 5

IDENTITY = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)

# per-site index order 1=0, X=1, Y=2, Z=3; "1" marks the identity factor in labels
PAULI_SYMBOLS = "1XYZ"
PAULIS = (IDENTITY, PAULI_X, PAULI_Y, PAULI_Z)

SPIN_UP = np.array([1, 0], dtype=complex)
SPIN_DOWN = np.array([0, 1], dtype=complex)


@dataclass(frozen=True, eq=False)
class OperatorBasis:
    """Ordered Pauli-string basis of traceless Hermitian operators on ``n_qubits``.

    ``elements`` has shape ``(4**n - 1, 2**n, 2**n)`` and ``labels[a]`` names
    ``elements[a]`` site by site, e.g. ``"X1"`` is X on qubit 1, identity on 2.
    """

    n_qubits: int
    elements: np.ndarray
    labels: tuple[str, ...]

    @property
    def dim(self) -> int:
        return 2 ** self.n_qubits

    @property
    def size(self) -> int:
        return len(self.labels)

    def __len__(self) -> int:
        return self.size

    def index(self, label: str) -> int:
        return self.labels.index(label)

    def element(self, label: str) -> np.ndarray:
        return self.elements[self.index(label)]


_BASIS_CACHE: dict[int, OperatorBasis] = {}


def pauli_string(label: str) -> np.ndarray:
    """Tensor product of single-qubit Paulis named by ``label`` (``"1"``/``"I"`` = identity)."""
    out = np.ones((1, 1), dtype=complex)
    for ch in label.upper():
        if ch == "I":
            ch = "1"
        if ch not in PAULI_SYMBOLS:
            raise ValueError(f"unknown Pauli symbol {ch!r} in {label!r}")
        out = np.kron(out, PAULIS[PAULI_SYMBOLS.index(ch)])
    return out


def pauli_string_basis(n_qubits: int) -> OperatorBasis:
    """Return the ``4**n - 1`` non-identity Pauli strings in lexicographic order.

    Examples
    --------
    >>> pauli_string_basis(1).labels
    ('X', 'Y', 'Z')
    >>> pauli_string_basis(2).labels[:4]
    ('1X', '1Y', '1Z', 'X1')
    """
    if isinstance(n_qubits, bool) or not isinstance(n_qubits, (int, np.integer)):
        raise DimensionError(f"n_qubits must be an integer, got {n_qubits!r}")
    n_qubits = int(n_qubits)
    if not 1 <= n_qubits <= MAX_QUBITS:
        raise DimensionError(f"n_qubits must lie in [1, {MAX_QUBITS}], got {n_qubits}")
    if n_qubits not in _BASIS_CACHE:
        labels = []
        mats = []
        for idx in itertools.product(range(4), repeat=n_qubits):
            if not any(idx):
                continue
            label = "".join(PAULI_SYMBOLS[i] for i in idx)
            labels.append(label)
            mats.append(pauli_string(label))
        elements = np.array(mats)
        elements.setflags(write=False)
        _BASIS_CACHE[n_qubits] = OperatorBasis(n_qubits, elements, tuple(labels))
    return _BASIS_CACHE[n_qubits]


def n_qubits_for_dim(dim: int) -> int:
    n = int(round(np.log2(dim))) if dim > 0 else -1
    if n < 1 or 2 ** n != dim:
        raise DimensionError(f"dimension {dim} is not a power of two >= 2")
    return n


def _basis_for_length(length: int) -> OperatorBasis:
    dim = int(round(np.sqrt(length + 1)))
    if dim * dim != length + 1:
        raise DimensionError(f"coherence vector length {length} is not N^2 - 1")
    return pauli_string_basis(n_qubits_for_dim(dim))


def is_hermitian(m, tol: float = 1e-12) -> bool:
    m = np.asarray(m)
    return m.ndim == 2 and m.shape[0] == m.shape[1] and bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol)


def dagger(m: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(m, -1, -2))


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def kron(a, b) -> np.ndarray:
    """Tensor product ``a (x) b``."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def ket_to_density(psi) -> np.ndarray:
    psi = np.asarray(psi, dtype=complex).ravel()
    return np.outer(psi, psi.conj())


def density_from_coherence(r, basis: OperatorBasis | None = None) -> np.ndarray:
    """Rebuild ``rho = (1 + sum_a r_a P_a) / N``.

    Positivity is *not* checked; the result is Hermitian with unit trace for
    any real ``r``.
    """
    r = np.asarray(r, dtype=float)
    if r.ndim != 1:
        raise DimensionError(f"coherence vector must be 1-D, got shape {r.shape}")
    if basis is None:
        basis = _basis_for_length(r.size)
    elif r.size != basis.size:
        raise DimensionError(f"coherence vector has length {r.size}, basis needs {basis.size}")
    rho = np.eye(basis.dim, dtype=complex) + np.tensordot(r, basis.elements, axes=1)
    return rho / basis.dim


def coherence_from_density(rho, basis: OperatorBasis | None = None, tol: float = 1e-10) -> np.ndarray:
    """Coherence vector ``r_a = Re Tr(P_a rho)`` of a Hermitian unit-trace matrix."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
    if basis is None:
        basis = pauli_string_basis(n_qubits_for_dim(rho.shape[0]))
    if rho.shape[0] != basis.dim:
        raise DimensionError(f"density matrix is {rho.shape[0]}x{rho.shape[0]}, basis acts on {basis.dim}")
    if not is_hermitian(rho, tol):
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidStateError(f"density matrix has trace {np.trace(rho).real:.6g}, expected 1")
    # Tr(P_a rho) = sum_ij P_a[i, j] rho[j, i]
    return np.einsum("aij,ji->a", basis.elements, rho).real


def purity(rho) -> float:
    rho = np.asarray(rho)
    return float(np.real(np.trace(rho @ rho)))


def check_density_matrix(rho, tol: float = 1e-9) -> np.ndarray:
    """Raise :class:`InvalidStateError` unless ``rho`` is Hermitian, unit trace and PSD within ``tol``."""
    rho = np.asarray(rho, dtype=complex)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidStateError(f"density matrix must be square, got shape {rho.shape}")
    if not is_hermitian(rho, tol):
        raise InvalidStateError("density matrix is not Hermitian")
    if abs(np.trace(rho) - 1.0) > tol:
        raise InvalidStateError(f"density matrix has trace {np.trace(rho).real:.6g}, expected 1")
    lowest = np.linalg.eigvalsh(rho)[0]
    if lowest < -tol:
        raise InvalidStateError(f"density matrix has negative eigenvalue {lowest:.3e}")
    return rho


def partial_trace(rho, keep: int, dims=(2, 2)) -> np.ndarray:
    """Reduced state of subsystem ``keep`` (0 or 1) of a bipartite operator."""
    rho = np.asarray(rho, dtype=complex)
    d1, d2 = (int(d) for d in dims)
    if rho.shape != (d1 * d2, d1 * d2):
        raise DimensionError(f"operator of shape {rho.shape} does not split as {d1}x{d2}")
    t = rho.reshape(d1, d2, d1, d2)
    if keep == 0:
        return np.einsum("ikjk->ij", t)
    if keep == 1:
        return np.einsum("kikj->ij", t)
    raise DimensionError(f"keep must be 0 or 1, got {keep!r}")


def sqrtm_psd(m: np.ndarray) -> np.ndarray:
    w, v = np.linalg.eigh(m)
    return (v * np.sqrt(np.clip(w, 0.0, None))) @ v.conj().T


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``(Tr sqrt(sqrt(rho) sigma sqrt(rho)))**2``."""
    s = sqrtm_psd(np.asarray(rho, dtype=complex))
    inner = s @ np.asarray(sigma, dtype=complex) @ s
    inner = (inner + inner.conj().T) / 2
    w = np.clip(np.linalg.eigvalsh(inner), 0.0, None)
    return float(np.sum(np.sqrt(w)) ** 2)


def random_hermitian(dim: int, rng: np.random.Generator, scale: float = 1.0, traceless: bool = False) -> np.ndarray:
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    h = scale * (g + g.conj().T) / 2
    if traceless:
        h -= np.trace(h) / dim * np.eye(dim)
    return h


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary via QR with phase correction."""
    z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int | None = None) -> np.ndarray:
    rank = dim if rank is None else rank
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_pure_state(dim: int, rng: np.random.Generator) -> np.ndarray:
    psi = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return psi / np.linalg.norm(psi)
