"""
Numerical propagation of the Bloch equation and of the master equation.

Two independent engines solve dv/dt = A v for a constant generator A: a
scaling-and-squaring matrix exponential (default) and an adaptive 4(5)
Runge-Kutta integrator. A third path propagates the 2x2 density matrix with
the Lindblad superoperator. All three exist to check the closed forms in
model_core and to handle Hamiltonians along arbitrary axes.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import expm

from ..utils.errors import NumericalFailure
from .types import BlochVector, ModelKind, ModelParams

logger = logging.getLogger(__name__)

ADAPTIVE_RTOL = 1e-10
ADAPTIVE_ATOL = 1e-13
# Norm overshoot above this is more than integration tolerance and is logged as a warning
NORM_CLIP_WARNING = 1e-8

_AXES = {"x": 0, "y": 1, "z": 2}

# Pauli matrices
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY = np.eye(2, dtype=complex)
_PAULIS = {"x": SIGMA_X, "y": SIGMA_Y, "z": SIGMA_Z}


@dataclass(frozen=True)
class BlochGenerator:
    """
    Constant generator A of dv/dt = A v

    The antisymmetric part carries the Hamiltonian (omega_x, omega_y, omega_z),
    the symmetric part -gamma (I - n n^T) the dephasing along axis n.
    """
    matrix: np.ndarray
    omega_x: float
    omega_y: float
    omega_z: float
    gamma: float
    dephasing_axis: str = "z"


def build_generator(
    omega_x: float,
    omega_y: float,
    omega_z: float,
    gamma: float,
    dephasing_axis: str = "z"
) -> BlochGenerator:
    """
    Lay out the Bloch generator

    With dephasing_axis='z' the matrix is
        [[-gamma, -omega_z, -omega_y],
         [omega_z, -gamma, -omega_x],
         [omega_y, omega_x, 0]]

    Args:
        omega_x, omega_y, omega_z: Hamiltonian coefficients (rad/time)
        gamma: Dephasing rate (1/time, >= 0)
        dephasing_axis: 'x', 'y' or 'z'

    Returns:
        BlochGenerator

    Raises:
        ValueError: If gamma is negative or the axis is unknown
    """
    if gamma < 0:
        raise ValueError(f"gamma must be >= 0, got {gamma}")
    if dephasing_axis not in _AXES:
        raise ValueError(f"dephasing_axis must be one of x, y, z; got '{dephasing_axis}'")

    rotation = np.array([
        [0.0, -omega_z, -omega_y],
        [omega_z, 0.0, -omega_x],
        [omega_y, omega_x, 0.0],
    ])
    damping = -gamma * np.ones(3)
    damping[_AXES[dephasing_axis]] = 0.0
    matrix = rotation + np.diag(damping)
    matrix.setflags(write=False)
    return BlochGenerator(matrix, float(omega_x), float(omega_y), float(omega_z),
                          float(gamma), dephasing_axis)


def generator_for_model(kind: ModelKind, params: ModelParams) -> BlochGenerator:
    """
    Generator reproducing each closed-form model

    M1y runs with omega_y = -omega: relabeling y -> z carries the M1z rotation
    onto that sense, which is what gives e^{-gamma t} cos(omega t + theta_I - theta_M).
    """
    omega, gamma = params.omega, params.gamma
    kind = ModelKind(kind)
    if kind is ModelKind.M1Z:
        return build_generator(0.0, 0.0, omega, gamma, "z")
    if kind is ModelKind.M1X:
        return build_generator(omega, 0.0, 0.0, gamma, "x")
    if kind is ModelKind.M1Y:
        return build_generator(0.0, -omega, 0.0, gamma, "y")
    if kind is ModelKind.M2:
        return build_generator(omega, 0.0, 0.0, gamma, "z")
    if kind is ModelKind.M3:
        return build_generator(0.0, omega, 0.0, gamma, "z")
    raise ValueError(f"Unsupported model kind: {kind}")


def drive_generator(
    rabi: float,
    phase: float,
    detuning: float,
    gamma: float,
    dephasing_axis: str = "z"
) -> BlochGenerator:
    """
    Generator for a resonant-frame drive at azimuth `phase` in the xy-plane

    H = (rabi/2)(cos(phase) sigma_x + sin(phase) sigma_y) + (detuning/2) sigma_z.
    phase = 0 reproduces M2; there is no closed form for other phases.
    """
    return build_generator(rabi * math.cos(phase), -rabi * math.sin(phase), detuning,
                           gamma, dephasing_axis)


def _propagate_expm(matrix: np.ndarray, v0: np.ndarray, t: float) -> np.ndarray:
    return expm(matrix * t) @ v0


def _propagate_adaptive(matrix: np.ndarray, v0: np.ndarray, t: float) -> np.ndarray:
    solution = solve_ivp(
        lambda _, v: matrix @ v,
        t_span=(0.0, t),
        y0=v0,
        method="RK45",
        rtol=ADAPTIVE_RTOL,
        atol=ADAPTIVE_ATOL,
    )
    if not solution.success:
        logger.error(f"[ORACLE] Adaptive integration failed at t={t}: {solution.message}")
        raise NumericalFailure(f"Adaptive integration failed: {solution.message}")
    result = solution.y[:, -1]
    # The generator never grows the norm; clip integration error above the sphere
    norm = float(np.linalg.norm(result))
    start_norm = float(np.linalg.norm(v0))
    if norm > start_norm:
        excess = norm - start_norm
        log = logger.warning if excess > NORM_CLIP_WARNING else logger.debug
        log(f"[ORACLE] RK45 overshot the initial norm by {excess:.3e} at t={t}; rescaled")
        result = result * (start_norm / norm)
    return result


def propagate(
    gen: BlochGenerator,
    v0: Union[BlochVector, np.ndarray],
    t: float,
    method: str = "expm"
) -> BlochVector:
    """
    Propagate a Bloch vector: v(t) = exp(A t) v0

    Args:
        gen: Generator
        v0: Initial Bloch vector
        t: Time (>= 0)
        method: 'expm' (matrix exponential) or 'rk45' (adaptive integration)

    Returns:
        BlochVector at time t

    Raises:
        ValueError: Negative time or unknown method
        NumericalFailure: The adaptive integrator gave up
    """
    if t < 0 or not math.isfinite(t):
        raise ValueError(f"t must be finite and >= 0, got {t}")
    start = v0.as_array() if isinstance(v0, BlochVector) else np.asarray(v0, dtype=float)
    if t == 0:
        return BlochVector.from_array(start)
    if method == "expm":
        result = _propagate_expm(gen.matrix, start, t)
    elif method == "rk45":
        result = _propagate_adaptive(gen.matrix, start, t)
    else:
        raise ValueError(f"Unknown propagation method '{method}'")
    return BlochVector.from_array(result)


def propagate_path(gen: BlochGenerator, v0: BlochVector, times: Iterable[float], method: str = "expm") -> np.ndarray:
    """Propagate to each time in `times`; returns an (n, 3) array"""
    return np.array([propagate(gen, v0, float(t), method).as_array() for t in times]).reshape(-1, 3)


def trace_from_state(v: BlochVector, theta_M: float) -> float:
    """p = Tr[M(theta_M) rho] = vx sin(theta_M) + vz cos(theta_M)"""
    return v.vx * math.sin(theta_M) + v.vz * math.cos(theta_M)


def numeric_trace(
    gen: BlochGenerator,
    theta_I: float,
    theta_M: float,
    times: Iterable[float],
    method: str = "expm"
) -> np.ndarray:
    """Measurement trace of an arbitrary generator for the pure initial state theta_I"""
    start = BlochVector.initial_state(theta_I)
    return np.array([trace_from_state(propagate(gen, start, float(t), method), theta_M) for t in times])


# ==================== DENSITY MATRIX ORACLE ====================

def density_from_bloch(v: BlochVector) -> np.ndarray:
    """rho = (I + vx sigma_x + vy sigma_y + vz sigma_z) / 2"""
    return 0.5 * (IDENTITY + v.vx * SIGMA_X + v.vy * SIGMA_Y + v.vz * SIGMA_Z)


def bloch_from_density(rho: np.ndarray) -> BlochVector:
    """v_a = Tr(rho sigma_a)"""
    return BlochVector(*(float(np.real(np.trace(rho @ sigma))) for sigma in (SIGMA_X, SIGMA_Y, SIGMA_Z)))


def measurement_operator(theta_M: float) -> np.ndarray:
    """M = |m+><m+| - |m-><m-| with |m+> = cos(theta_M/2)|0> + sin(theta_M/2)|1>"""
    plus = np.array([math.cos(theta_M / 2), math.sin(theta_M / 2)], dtype=complex)
    minus = np.array([math.sin(theta_M / 2), -math.cos(theta_M / 2)], dtype=complex)
    return np.outer(plus, plus.conj()) - np.outer(minus, minus.conj())


def lindbladian(gen: BlochGenerator) -> np.ndarray:
    """
    4x4 superoperator L with vec(d rho/dt) = L vec(rho) (row-major vec)

    H = (omega_x sigma_x - omega_y sigma_y + omega_z sigma_z) / 2 and
    V = sqrt(gamma/2) sigma_axis, with D[V] rho = V rho V^+ - {V^+ V, rho}/2.
    """
    hamiltonian = 0.5 * (gen.omega_x * SIGMA_X - gen.omega_y * SIGMA_Y + gen.omega_z * SIGMA_Z)
    jump = math.sqrt(gen.gamma / 2.0) * _PAULIS[gen.dephasing_axis]
    jump_sq = jump.conj().T @ jump

    # Row-major vec: vec(A X B) = kron(A, B^T) vec(X)
    liouvillian = -1j * (np.kron(hamiltonian, IDENTITY) - np.kron(IDENTITY, hamiltonian.T))
    liouvillian += np.kron(jump, jump.conj())
    liouvillian -= 0.5 * (np.kron(jump_sq, IDENTITY) + np.kron(IDENTITY, jump_sq.T))
    return liouvillian


def propagate_density_matrix(gen: BlochGenerator, rho0: np.ndarray, t: float) -> np.ndarray:
    """rho(t) = exp(L t) rho0 for the master equation matching `gen`"""
    if t < 0 or not math.isfinite(t):
        raise ValueError(f"t must be finite and >= 0, got {t}")
    vec = expm(lindbladian(gen) * t) @ np.asarray(rho0, dtype=complex).reshape(4)
    return vec.reshape(2, 2)


def density_matrix_trace(gen: BlochGenerator, theta_I: float, theta_M: float, t: float) -> float:
    """Tr[M rho(t)] from the master equation, for the pure initial state theta_I"""
    rho0 = density_from_bloch(BlochVector.initial_state(theta_I))
    rho_t = propagate_density_matrix(gen, rho0, t)
    return float(np.real(np.trace(measurement_operator(theta_M) @ rho_t)))
