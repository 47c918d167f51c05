"""Ready-made systems: a relaxing spin-1/2, two damped coupled spins, pulsed NMR.

Time is measured in units of the damping rate unless stated otherwise.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.linalg import expm
from scipy.optimize import minimize_scalar

from .control import ControlSpec, bloch_generators, stabilized_fixed_point
from .entanglement import entanglement_of_formation
from .errors import (
    DomainError,
    InvalidModelError,
    NoStroboscopicFixedPointError,
    NotRelaxingError,
    QRelaxError,
)
from .lindblad import LindbladModel, build_affine, fixed_point, is_relaxing
from .operators import (
    IDENTITY,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SPIN_DOWN,
    SPIN_UP,
    OperatorBasis,
    fidelity,
    kron,
    ket_to_density,
    random_hermitian,
)

logger = logging.getLogger(__name__)

MAX_CONDITION = 1e12

# |up><down|: drives a spin to Z = +1 with T1 = 1/gamma1 and T2 = 2/gamma1
RAISING = (PAULI_X + 1j * PAULI_Y) / 2


@dataclass(frozen=True)
class OneSpinParams:
    gamma1: float = 1.0
    gamma2: float = 1.0

    def __post_init__(self):
        if self.gamma1 <= 0:
            raise InvalidModelError(f"gamma1 must be positive, got {self.gamma1}")
        if self.gamma2 < self.gamma1 / 2:
            raise InvalidModelError(f"gamma2 = {self.gamma2} is below gamma1/2 = {self.gamma1 / 2}")

    @property
    def T1(self) -> float:
        return 1.0 / self.gamma1

    @property
    def T2(self) -> float:
        return 1.0 / self.gamma2


@dataclass(frozen=True)
class TwoSpinParams:
    gamma: float = 1.0
    J: float = 1.0

    def __post_init__(self):
        if self.gamma <= 0:
            raise InvalidModelError(f"gamma must be positive, got {self.gamma}")
        if self.J < 0:
            raise InvalidModelError(f"J must be non-negative, got {self.J}")


def one_spin_model(p: OneSpinParams) -> LindbladModel:
    """Amplitude damping at ``gamma1`` plus pure dephasing topping transverse decay up to ``gamma2``."""
    dephasing = np.sqrt(p.gamma2 / 2 - p.gamma1 / 4)
    return LindbladModel(
        np.zeros((2, 2), dtype=complex),
        (np.sqrt(p.gamma1) * RAISING, dephasing * PAULI_Z),
    )


def two_spin_model(p: TwoSpinParams) -> LindbladModel:
    """Two spins damped independently at ``gamma``, coupled by ``J Z1 Z2``."""
    damp = np.sqrt(p.gamma)
    return LindbladModel(
        p.J * kron(PAULI_Z, PAULI_Z),
        (damp * kron(RAISING, IDENTITY), damp * kron(IDENTITY, RAISING)),
    )


def magic_control(J: float) -> ControlSpec:
    """``4 sqrt(J)/5 (X1 + X2) - J (Z1 + Z2)``; pins the two-spin state near ``rho_e`` for large J."""
    if J <= 0:
        raise DomainError(f"J must be positive, got {J}")
    a = 4 * np.sqrt(J) / 5
    names = ("X1", "Z1", "X2", "Z2")
    return ControlSpec(
        (kron(PAULI_X, IDENTITY), kron(PAULI_Z, IDENTITY), kron(IDENTITY, PAULI_X), kron(IDENTITY, PAULI_Z)),
        (a, -J, a, -J),
        names,
    )


def bell_mixture_state() -> np.ndarray:
    """``rho_e = 1/2 |up up><up up| + 1/2 |psi+><psi+|``, psi+ the symmetric Bell state."""
    psi1 = np.kron(SPIN_UP, SPIN_UP)
    psi2 = (np.kron(SPIN_UP, SPIN_DOWN) + np.kron(SPIN_DOWN, SPIN_UP)) / np.sqrt(2)
    return 0.5 * ket_to_density(psi1) + 0.5 * ket_to_density(psi2)


@dataclass(frozen=True)
class EntanglementRow:
    J: float
    eof: float
    concurrence: float
    fidelity_to_rho_e: float
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.error is None


def entanglement_vs_J(gamma: float, J_values: Sequence[float]) -> list[EntanglementRow]:
    """Entanglement of the magic-controlled two-spin fixed point along ``J_values``.

    A row whose solve fails carries the error text and NaN values; the sweep
    continues.
    """
    if gamma <= 0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    rho_e = bell_mixture_state()
    rows = []
    for J in J_values:
        J = float(J)
        try:
            if J <= 0:
                raise DomainError(f"J must be positive, got {J}")
            res = stabilized_fixed_point(two_spin_model(TwoSpinParams(gamma, J)), magic_control(J))
            rep = entanglement_of_formation(res.rho)
            rows.append(EntanglementRow(J, rep.eof, rep.concurrence, fidelity(res.rho, rho_e)))
        except QRelaxError as exc:
            logger.warning("sweep row J=%g failed: %s", J, exc)
            rows.append(EntanglementRow(J, np.nan, np.nan, np.nan, f"{type(exc).__name__}: {exc}"))
    return rows


@dataclass(frozen=True, eq=False)
class PulseTrain:
    """Instantaneous pulses ``exp(-i H_c dt)`` repeated every ``dt``."""

    u: np.ndarray
    dt: float
    generators: tuple

    def __post_init__(self):
        if not self.dt > 0:
            raise DomainError(f"pulse interval must be positive, got {self.dt}")
        object.__setattr__(self, "u", np.asarray(self.u, dtype=float).ravel())
        object.__setattr__(self, "generators", tuple(self.generators))

    @property
    def control(self) -> ControlSpec:
        return ControlSpec(self.generators, self.u)


def adjoint_rotation(U: np.ndarray, basis: OperatorBasis) -> np.ndarray:
    """Real orthogonal matrix of ``rho -> U rho U^+`` in coherence coordinates."""
    images = U @ basis.elements @ U.conj().T
    p = basis.elements.reshape(basis.size, -1)
    x = np.swapaxes(images, -1, -2).reshape(basis.size, -1)
    return (p @ x.T).real / basis.dim


def stroboscopic_map(model: LindbladModel, train: PulseTrain) -> tuple[np.ndarray, np.ndarray]:
    """``(RM, Rv)`` for one period ``r -> R (M r + v)``: free relaxation, then the pulse."""
    rep = build_affine(model)
    check = is_relaxing(rep)
    if not check:
        raise NotRelaxingError("free evolution is not relaxing", check.spectrum, check.condition_number)
    rf = fixed_point(rep).r
    M = expm(rep.generator * train.dt)
    v = rf - M @ rf
    U = expm(-1j * train.control.hamiltonian * train.dt)
    R = adjoint_rotation(U, rep.basis)
    return R @ M, R @ v


def pulsed_steady_state(model: LindbladModel, train: PulseTrain) -> np.ndarray:
    """Exact fixed point of the period map, sampled just after each pulse."""
    RM, Rv = stroboscopic_map(model, train)
    lhs = np.eye(RM.shape[0]) - RM
    cond = np.linalg.cond(lhs)
    if not np.isfinite(cond) or cond > MAX_CONDITION:
        raise NoStroboscopicFixedPointError(f"I - RM is singular (condition number {cond:.3e})")
    return np.linalg.solve(lhs, Rv)


def transverse_magnitude(r) -> float:
    return float(np.hypot(r[0], r[1]))


def max_transverse_magnetization(p: OneSpinParams, dt: float | None = None) -> tuple[float, float]:
    """Largest steady transverse magnetization reachable by a y-rotation control.

    Continuous control (``dt=None``) optimizes the amplitude ``u_y`` of
    :func:`bloch_generators`; pulsed control optimizes the flip angle
    ``u_y dt`` in ``(0, pi)``.  Returns ``(magnitude, u_y)``.
    """
    model = one_spin_model(p)
    gens = bloch_generators()

    if dt is None:
        def negmag(log_u):
            ctrl = ControlSpec(gens, (0.0, np.exp(log_u), 0.0))
            return -transverse_magnitude(stabilized_fixed_point(model, ctrl).r)

        scale = np.log(np.sqrt(p.gamma1 * p.gamma2))
        opt = minimize_scalar(negmag, bounds=(scale - 10, scale + 10), method="bounded",
                              options={"xatol": 1e-10})
        return -opt.fun, float(np.exp(opt.x))

    def negmag_pulsed(theta):
        train = PulseTrain((0.0, theta / dt, 0.0), dt, gens)
        return -transverse_magnitude(pulsed_steady_state(model, train))

    opt = minimize_scalar(negmag_pulsed, bounds=(1e-9, np.pi - 1e-9), method="bounded",
                          options={"xatol": 1e-12})
    return -opt.fun, float(opt.x / dt)


def random_damping_model(
    n_qubits: int,
    rng: np.random.Generator,
    drift_scale: float = 1.0,
    rate_range=(0.5, 2.0),
    extra_dissipator: bool = True,
) -> LindbladModel:
    """Random relaxing model: per-qubit damping and dephasing, random drift.

    Optionally adds one random dense dissipator of modest weight.
    """
    dim = 2 ** n_qubits
    dissipators = []
    for site in range(n_qubits):
        ops = [IDENTITY] * n_qubits
        ops[site] = RAISING
        damp = _kron_all(ops)
        ops[site] = PAULI_Z
        deph = _kron_all(ops)
        dissipators.append(np.sqrt(rng.uniform(*rate_range)) * damp)
        dissipators.append(np.sqrt(rng.uniform(0.0, rate_range[0])) * deph)
    if extra_dissipator:
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        dissipators.append(0.3 * g / np.linalg.norm(g, 2))
    h = random_hermitian(dim, rng, scale=drift_scale)
    return LindbladModel(h, tuple(dissipators))


def _kron_all(ops) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for op in ops:
        out = np.kron(out, op)
    return out

