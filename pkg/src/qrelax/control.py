"""Hamiltonian control of relaxing semigroups.

A control Hamiltonian ``H_c = sum_a u_a G_a`` leaves the dissipative data
``(B, c)`` untouched and only adds to the skew part ``A``.  Because ``A`` is
linear in ``u``, asking which controls make a target ``r*`` the fixed point
is a linear least-squares problem in ``u``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import (
    DegenerateSpectrumError,
    DimensionError,
    InvalidModelError,
    InvalidStateError,
    NotRelaxingError,
    NotStabilizableError,
    SingularTargetError,
)
from .lindblad import (
    FixedPointResult,
    LindbladModel,
    build_affine,
    fixed_point,
    hamiltonian_matrix,
)
from .operators import (
    PAULI_SYMBOLS,
    is_hermitian,
    pauli_string,
    pauli_string_basis,
)

STABILIZABLE_RESIDUAL = 1e-8


@dataclass(frozen=True, eq=False)
class ControlSpec:
    """Control directions ``G_a`` with amplitudes ``u_a``."""

    generators: tuple
    u: np.ndarray
    labels: tuple | None = None

    def __post_init__(self):
        gens = tuple(np.array(g, dtype=complex) for g in self.generators)
        u = np.array(self.u, dtype=float).ravel()
        if len(gens) != u.size:
            raise InvalidModelError(f"{len(gens)} generators but {u.size} amplitudes")
        for k, g in enumerate(gens):
            if g.ndim != 2 or g.shape != gens[0].shape:
                raise DimensionError(f"generator {k} has shape {g.shape}")
            if not is_hermitian(g, 1e-12):
                raise InvalidModelError(f"generator {k} is not Hermitian")
            if abs(np.trace(g)) > 1e-12:
                raise InvalidModelError(f"generator {k} is not traceless")
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "u", u)
        if self.labels is not None:
            object.__setattr__(self, "labels", tuple(self.labels))

    @property
    def hamiltonian(self) -> np.ndarray:
        if not self.generators:
            raise InvalidModelError("control has no generators")
        return np.tensordot(self.u, np.array(self.generators), axes=1)

    def scaled(self, mu: float) -> "ControlSpec":
        return ControlSpec(self.generators, mu * self.u, self.labels)

    @classmethod
    def from_names(cls, names: Sequence[str], u, n_qubits: int) -> "ControlSpec":
        return cls(named_generators(names, n_qubits), u, tuple(names))


_SITE_NAME = re.compile(r"^([XYZ])(\d+)$")


def named_generator(name: str, n_qubits: int) -> np.ndarray:
    """Resolve a generator name.

    ``"X1"``-style names put a Pauli on one (1-based) site; a string of
    ``n_qubits`` symbols from ``1IXYZ`` is a full Pauli string (``"ZZ"``).
    The two readings agree whenever both apply.
    """
    key = name.strip().upper()
    if len(key) == n_qubits and all(ch in PAULI_SYMBOLS + "I" for ch in key):
        if set(key) <= set("1I"):
            raise InvalidModelError("the identity string is not a control direction")
        return pauli_string(key)
    m = _SITE_NAME.match(key)
    if m:
        site = int(m.group(2))
        if not 1 <= site <= n_qubits:
            raise InvalidModelError(f"generator {name!r} addresses site {site} of {n_qubits}")
        label = ["1"] * n_qubits
        label[site - 1] = m.group(1)
        return pauli_string("".join(label))
    raise InvalidModelError(f"cannot parse generator name {name!r}")


def named_generators(names: Sequence[str], n_qubits: int) -> tuple:
    return tuple(named_generator(n, n_qubits) for n in names)


def local_generator_names(n_qubits: int) -> list[str]:
    return [f"{p}{site}" for site in range(1, n_qubits + 1) for p in "XYZ"]


def local_generators(n_qubits: int) -> tuple:
    """Single-site Paulis ``X1, Y1, Z1, X2, ...``."""
    return named_generators(local_generator_names(n_qubits), n_qubits)


def full_generators(n_qubits: int) -> tuple:
    """Every Pauli string, i.e. a basis of all traceless Hamiltonians."""
    return tuple(pauli_string_basis(n_qubits).elements)


def bloch_generators() -> tuple:
    """Spin-1/2 operators ``X/2, Y/2, Z/2``.

    With these, ``u`` enters the Bloch equations as ``dr/dt = u x r``, which
    is the parametrization used by :func:`one_spin_controller`.
    """
    return tuple(pauli_string(p) / 2 for p in "XYZ")


def controlled_model(model: LindbladModel, ctrl: ControlSpec) -> LindbladModel:
    if ctrl.generators and ctrl.generators[0].shape != (model.dim, model.dim):
        raise DimensionError(f"control acts on {ctrl.generators[0].shape}, model on dimension {model.dim}")
    if not ctrl.generators:
        return model
    return model.with_hamiltonian(model.hamiltonian + ctrl.hamiltonian)


def stabilized_fixed_point(model: LindbladModel, ctrl: ControlSpec) -> FixedPointResult:
    """Fixed point of the semigroup with ``H_drift + sum u_a G_a``."""
    return fixed_point(build_affine(controlled_model(model, ctrl)))


@dataclass(frozen=True, eq=False)
class SynthesisResult:
    u: np.ndarray
    residual: float
    achieved_fixed_point: FixedPointResult | None

    @property
    def stabilizable(self) -> bool:
        return self.residual < STABILIZABLE_RESIDUAL


def _check_target(target, dim: int) -> np.ndarray:
    r = np.asarray(target, dtype=float).ravel()
    if r.size != dim * dim - 1:
        raise DimensionError(f"target has length {r.size}, expected {dim * dim - 1}")
    if float(r @ r) > dim - 1 + 1e-9:
        raise InvalidStateError(f"target violates the purity bound: |r|^2 = {r @ r:.6g} > {dim - 1}")
    return r


def synthesize_controller(model: LindbladModel, generators: Sequence, target) -> SynthesisResult:
    """Minimum-norm controls that make ``target`` the fixed point.

    Solves ``sum_a u_a A_a r* = -(A_drift + B) r* - c`` in the least-squares
    sense, ``A_a`` being the coherence-space matrix of generator ``a``.  A
    residual below ``1e-8`` certifies that the target is stabilizable with
    these generators.
    """
    rep = build_affine(model)
    r = _check_target(target, model.dim)
    gens = [np.asarray(g, dtype=complex) for g in generators]
    if not gens:
        raise InvalidModelError("no control generators given")
    columns = np.column_stack([hamiltonian_matrix(g, rep.basis) @ r for g in gens])
    rhs = -(rep.A + rep.B) @ r - rep.c
    u, *_ = np.linalg.lstsq(columns, rhs, rcond=None)
    residual = float(np.linalg.norm(columns @ u - rhs))
    try:
        achieved = stabilized_fixed_point(model, ControlSpec(gens, u))
    except NotRelaxingError:
        achieved = None
    return SynthesisResult(u, residual, achieved)


def ellipsoid_residual(r, gamma1: float, gamma2: float) -> float:
    """``(z - 1/2)^2 + (gamma2/gamma1)(x^2 + y^2) - 1/4`` for a Bloch vector."""
    x, y, z = np.asarray(r, dtype=float)
    return float((z - 0.5) ** 2 + gamma2 / gamma1 * (x * x + y * y) - 0.25)


def one_spin_controller(x: float, y: float, z: float, gamma1: float, gamma2: float) -> tuple[float, float]:
    """Closed-form ``(u_x, u_y)`` reaching Bloch point ``(x, y, z)`` with ``u_z = 0``.

    Amplitudes refer to :func:`bloch_generators`.  Setting ``dr/dt = 0`` in the
    controlled Bloch equations gives ``u_x = -gamma2 y / z`` and
    ``u_y = gamma2 x / z``.
    """
    if abs(z) <= 1e-9:
        raise SingularTargetError(f"z = {z:.3e} is too close to zero")
    if abs(ellipsoid_residual((x, y, z), gamma1, gamma2)) > 1e-6:
        raise NotStabilizableError(f"({x}, {y}, {z}) is not on the stabilizable ellipsoid")
    return -gamma2 * y / z, gamma2 * x / z


def fixed_point_jacobian(model: LindbladModel, generators: Sequence, u0, step: float = 1e-5) -> np.ndarray:
    """Central-difference Jacobian of ``u -> r_f(u)``, shape ``(N^2-1, len(u0))``."""
    u0 = np.asarray(u0, dtype=float)
    gens = tuple(generators)
    cols = []
    for a in range(u0.size):
        du = np.zeros_like(u0)
        du[a] = step
        plus = stabilized_fixed_point(model, ControlSpec(gens, u0 + du)).r
        minus = stabilized_fixed_point(model, ControlSpec(gens, u0 - du)).r
        cols.append((plus - minus) / (2 * step))
    return np.column_stack(cols)


def manifold_dimension(
    model: LindbladModel,
    generators: Sequence,
    u0,
    step: float = 1e-5,
    rel_cutoff: float = 1e-6,
    gap: float = 1e-6,
) -> int:
    """Numerical rank of the fixed-point map's Jacobian at ``u0``."""
    base = stabilized_fixed_point(model, ControlSpec(tuple(generators), u0))
    evals = np.linalg.eigvalsh(base.rho)
    if np.min(np.diff(evals)) <= gap:
        raise DegenerateSpectrumError(f"fixed-point eigenvalues {evals} are (nearly) degenerate")
    jac = fixed_point_jacobian(model, generators, u0, step)
    s = np.linalg.svd(jac, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > rel_cutoff * s[0]))


@dataclass(frozen=True, eq=False)
class ManifoldSample:
    results: list
    controls: np.ndarray
    n_skipped: int

    def __len__(self):
        return len(self.results)

    def __iter__(self):
        return iter(self.results)

    def __getitem__(self, k):
        return self.results[k]

    @property
    def points(self) -> np.ndarray:
        return np.array([res.r for res in self.results])


def sample_manifold(
    model: LindbladModel,
    generators: Sequence,
    n_samples: int,
    amplitude_scale: float,
    seed: int = 0,
) -> ManifoldSample:
    """Fixed points for controls drawn uniformly from ``[-scale, scale]^m``.

    All draws are made up front from ``seed`` so the result does not depend on
    evaluation order.  Draws whose generator is not relaxing are skipped and
    counted.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be >= 1, got {n_samples}")
    gens = tuple(generators)
    rng = np.random.default_rng(seed)
    draws = rng.uniform(-amplitude_scale, amplitude_scale, size=(n_samples, len(gens)))
    results, kept, skipped = [], [], 0
    for u in draws:
        try:
            results.append(stabilized_fixed_point(model, ControlSpec(gens, u)))
            kept.append(u)
        except NotRelaxingError:
            skipped += 1
    return ManifoldSample(results, np.array(kept).reshape(-1, len(gens)), skipped)
