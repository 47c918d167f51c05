"""Lindblad generators in affine coherence-vector form.

A model ``(H, {L_k})`` generates

    d rho/dt = -i[H, rho] + 1/2 sum_k ([L_k, rho L_k^+] + [L_k rho, L_k^+])

and, in the Pauli-string basis, the equivalent real affine system
``dr/dt = A r + B r + c``.  ``A`` comes from ``H`` alone and is
skew-symmetric; ``B`` and ``c`` come from the dissipators alone.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.linalg import expm, lu_factor, lu_solve

from .errors import DimensionError, DomainError, InvalidModelError, NotRelaxingError
from .operators import (
    OperatorBasis,
    dagger,
    density_from_coherence,
    is_hermitian,
    n_qubits_for_dim,
    pauli_string_basis,
)

logger = logging.getLogger(__name__)

RELAXING_ABSCISSA_TOL = 1e-10
MAX_CONDITION = 1e12


@dataclass(frozen=True, eq=False)
class LindbladModel:
    """Drift Hamiltonian plus dissipators ``L_k`` (amplitudes in sqrt(rate))."""

    hamiltonian: np.ndarray
    dissipators: tuple = ()

    def __post_init__(self):
        h = np.array(self.hamiltonian, dtype=complex)
        if h.ndim != 2 or h.shape[0] != h.shape[1]:
            raise InvalidModelError(f"hamiltonian must be square, got shape {h.shape}")
        if not is_hermitian(h, 1e-12):
            raise InvalidModelError("hamiltonian is not Hermitian")
        ls = tuple(np.array(L, dtype=complex) for L in self.dissipators)
        for k, L in enumerate(ls):
            if L.shape != h.shape:
                raise DimensionError(f"dissipator {k} has shape {L.shape}, hamiltonian {h.shape}")
        h.setflags(write=False)
        for L in ls:
            L.setflags(write=False)
        object.__setattr__(self, "hamiltonian", h)
        object.__setattr__(self, "dissipators", ls)

    @property
    def dim(self) -> int:
        return self.hamiltonian.shape[0]

    @property
    def n_qubits(self) -> int:
        return n_qubits_for_dim(self.dim)

    def with_hamiltonian(self, hamiltonian) -> "LindbladModel":
        return LindbladModel(hamiltonian, self.dissipators)

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        """Right-hand side of the master equation at ``rho``."""
        return hamiltonian_superop(self.hamiltonian, rho) + dissipator_superop(self.dissipators, rho)


def hamiltonian_superop(h: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """``-i[H, rho]``; ``rho`` may be a stack of matrices."""
    return -1j * (h @ rho - rho @ h)


def dissipator_superop(dissipators: Sequence[np.ndarray], rho: np.ndarray) -> np.ndarray:
    """``1/2 sum_k ([L, rho L^+] + [L rho, L^+])``; ``rho`` may be a stack."""
    out = np.zeros(np.shape(rho), dtype=complex)
    for L in dissipators:
        Ld = dagger(L)
        LdL = Ld @ L
        out += L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
    return out


def _project(basis: OperatorBasis, images: np.ndarray) -> np.ndarray:
    # M[a, b] = Re Tr(P_a X_b) / N, done as one matmul over flattened operators
    p = basis.elements.reshape(basis.size, -1)
    x = np.swapaxes(images, -1, -2).reshape(images.shape[0], -1)
    return (p @ x.T).real / basis.dim


def _basis_for(model: LindbladModel, basis: OperatorBasis | None) -> OperatorBasis:
    if basis is None:
        return pauli_string_basis(model.n_qubits)
    if basis.dim != model.dim:
        raise DimensionError(f"model acts on dimension {model.dim}, basis on {basis.dim}")
    return basis


def hamiltonian_matrix(h: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Real skew-symmetric matrix of ``rho -> -i[H, rho]`` in coherence coordinates."""
    h = np.asarray(h, dtype=complex)
    if h.shape != (basis.dim, basis.dim):
        raise DimensionError(f"operator of shape {h.shape} does not act on dimension {basis.dim}")
    return _project(basis, hamiltonian_superop(h, basis.elements))


def dissipative_part(dissipators: Sequence[np.ndarray], basis: OperatorBasis) -> tuple[np.ndarray, np.ndarray]:
    """``(B, c)`` of the dissipator, with ``c`` the image of the identity."""
    B = _project(basis, dissipator_superop(dissipators, basis.elements))
    ident = np.eye(basis.dim, dtype=complex)[None]
    c = _project(basis, dissipator_superop(dissipators, ident))[:, 0]
    return B, c


@dataclass(frozen=True, eq=False)
class CoherenceRep:
    """Affine coherence-vector system ``dr/dt = (A + B) r + c``."""

    basis: OperatorBasis
    A: np.ndarray
    B: np.ndarray
    c: np.ndarray

    @property
    def generator(self) -> np.ndarray:
        return self.A + self.B

    def rhs(self, r: np.ndarray) -> np.ndarray:
        return self.generator @ r + self.c

    def with_A(self, A: np.ndarray) -> "CoherenceRep":
        return CoherenceRep(self.basis, A, self.B, self.c)


def build_affine(model: LindbladModel, basis: OperatorBasis | None = None) -> CoherenceRep:
    """Project ``model`` onto ``basis`` (default: Pauli strings of the right size)."""
    basis = _basis_for(model, basis)
    A = hamiltonian_matrix(model.hamiltonian, basis)
    B, c = dissipative_part(model.dissipators, basis)
    return CoherenceRep(basis, A, B, c)


@dataclass(frozen=True)
class RelaxationCheck:
    """Outcome of :func:`is_relaxing`; truthy iff the semigroup relaxes."""

    relaxing: bool
    spectrum: np.ndarray = field(repr=False)
    spectral_abscissa: float
    condition_number: float

    def __bool__(self) -> bool:
        return self.relaxing


def _condition(M: np.ndarray) -> float:
    s = np.linalg.svd(M, compute_uv=False)
    if s[-1] == 0.0:
        return float("inf")
    return float(s[0] / s[-1])


def is_relaxing(rep: CoherenceRep) -> RelaxationCheck:
    """True iff every eigenvalue of ``A + B`` has real part below ``-1e-10``."""
    M = rep.generator
    spectrum = np.linalg.eigvals(M)
    abscissa = float(np.max(spectrum.real))
    cond = _condition(M)
    relaxing = abscissa < -RELAXING_ABSCISSA_TOL and cond <= MAX_CONDITION
    return RelaxationCheck(relaxing, spectrum, abscissa, cond)


@dataclass(frozen=True, eq=False)
class FixedPointResult:
    r: np.ndarray
    rho: np.ndarray
    spectrum: np.ndarray
    condition_number: float
    relaxing: bool
    residual: float

    @property
    def spectral_abscissa(self) -> float:
        return float(np.max(self.spectrum.real))


def fixed_point(rep: CoherenceRep) -> FixedPointResult:
    """Solve ``(A + B) r_f = -c`` with a pivoted LU factorization.

    Raises
    ------
    NotRelaxingError
        If the condition number of ``A + B`` exceeds ``1e12``.
    """
    check = is_relaxing(rep)
    M = rep.generator
    if not np.isfinite(check.condition_number) or check.condition_number > MAX_CONDITION:
        raise NotRelaxingError(
            f"A+B is singular (condition number {check.condition_number:.3e}, "
            f"spectral abscissa {check.spectral_abscissa:.3e})",
            spectrum=check.spectrum,
            condition_number=check.condition_number,
        )
    r = lu_solve(lu_factor(M), -rep.c)
    residual = float(np.linalg.norm(M @ r + rep.c))
    rho = density_from_coherence(r, rep.basis)
    return FixedPointResult(r, rho, check.spectrum, check.condition_number, check.relaxing, residual)


def propagate(rep: CoherenceRep, r0, t: float) -> np.ndarray:
    """Closed-form solution ``r(t) = exp((A+B)t)(r0 - r_f) + r_f``.

    Non-relaxing generators are handled by exponentiating the augmented
    affine block ``[[A+B, c], [0, 0]]`` acting on ``(r, 1)``.
    """
    if t < 0:
        raise DomainError(f"propagation time must be non-negative, got {t}")
    r0 = np.asarray(r0, dtype=float)
    if r0.shape != rep.c.shape:
        raise DimensionError(f"initial vector has shape {r0.shape}, expected {rep.c.shape}")
    if t == 0:
        return r0.copy()
    M = rep.generator
    if is_relaxing(rep):
        rf = fixed_point(rep).r
        return expm(M * t) @ (r0 - rf) + rf
    logger.debug("generator not relaxing; using augmented affine exponential")
    m = M.shape[0]
    aug = np.zeros((m + 1, m + 1))
    aug[:m, :m] = M
    aug[:m, m] = rep.c
    return (expm(aug * t) @ np.append(r0, 1.0))[:m]


def integrate_rk4(rep: CoherenceRep, r0, t: float, dt: float) -> tuple[np.ndarray, np.ndarray]:
    """Classical fixed-step RK4 for ``dr/dt = (A+B) r + c``.

    The step is shrunk slightly so that an integer number of steps lands
    exactly on ``t``.  Returns ``(times, states)`` with ``states[k]`` at
    ``times[k]``.
    """
    if dt <= 0:
        raise DomainError(f"step must be positive, got {dt}")
    if t < 0:
        raise DomainError(f"integration time must be non-negative, got {t}")
    n_steps = max(int(np.ceil(t / dt - 1e-9)), 1) if t > 0 else 0
    h = t / n_steps if n_steps else 0.0
    M, c = rep.generator, rep.c
    states = np.empty((n_steps + 1, c.size))
    states[0] = r = np.asarray(r0, dtype=float)
    for k in range(n_steps):
        k1 = M @ r + c
        k2 = M @ (r + 0.5 * h * k1) + c
        k3 = M @ (r + 0.5 * h * k2) + c
        k4 = M @ (r + h * k3) + c
        r = r + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        states[k + 1] = r
    times = np.linspace(0.0, t, n_steps + 1)
    return times, states
