"""
Closed-form Bloch dynamics and measurement traces for the five model variants.

All traces are written in an omega-hat-free form on top of the damped kernels
c(t) and s(t), so one code path covers the underdamped, critical and overdamped
regimes. Time arguments may be scalars or 1-D arrays; scalars come back as floats.

Measurement convention: M(theta_M) has Bloch axis (sin theta_M, 0, cos theta_M),
so p(t) = vx sin theta_M + vz cos theta_M.
"""

import math
from typing import Callable, Dict, Tuple

import numpy as np

from .types import (
    ArrayLike,
    BlochVector,
    DampedBasisPair,
    EffectiveFrequency,
    ExperimentGeometry,
    ModelKind,
    ModelParams,
    Regime,
)

# |omega^2 - gamma^2/4| <= CRITICAL_TOLERANCE * max(1, gamma^2) counts as critical
CRITICAL_TOLERANCE = 1e-9
# Inside this band the kernels come from a Taylor series in omega^2 - gamma^2/4
SERIES_BAND = 1e-5
SERIES_TERMS = 4
# ... but only while |delta| t^2 stays small: truncation error ~ (|delta| t^2)^4 / 8!
SERIES_REACH = 1e-2

# (2k)! and (2k+1)! for k = 0..3
_EVEN_FACTORIALS = np.array([math.factorial(2 * k) for k in range(SERIES_TERMS)], dtype=float)
_ODD_FACTORIALS = np.array([math.factorial(2 * k + 1) for k in range(SERIES_TERMS)], dtype=float)


def _as_times(t: ArrayLike) -> Tuple[np.ndarray, bool]:
    """Coerce t to a float array and remember whether it was a scalar"""
    scalar = np.ndim(t) == 0
    times = np.atleast_1d(np.asarray(t, dtype=float))
    if times.ndim != 1:
        raise ValueError(f"times must be a scalar or 1-D array, got shape {times.shape}")
    if np.any(times < 0) or not np.all(np.isfinite(times)):
        raise ValueError("times must be finite and >= 0")
    return times, scalar


def _output(values: np.ndarray, scalar: bool) -> ArrayLike:
    return float(values[0]) if scalar else values


def effective_frequency(params: ModelParams) -> EffectiveFrequency:
    """
    Classify the damping regime and return the effective frequency

    Args:
        params: Model parameters

    Returns:
        EffectiveFrequency with a nonnegative value
    """
    delta = params.omega ** 2 - 0.25 * params.gamma ** 2
    tolerance = CRITICAL_TOLERANCE * max(1.0, params.gamma ** 2)
    if delta > tolerance:
        return EffectiveFrequency(Regime.UNDERDAMPED, math.sqrt(delta))
    if delta < -tolerance:
        return EffectiveFrequency(Regime.OVERDAMPED, math.sqrt(-delta))
    return EffectiveFrequency(Regime.CRITICAL, 0.0)


def _series_kernels(delta: float, times: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """cos(w t) and sin(w t)/w as power series in delta = w^2 (delta may be negative)"""
    powers = (-delta * times[:, None] ** 2) ** np.arange(SERIES_TERMS)[None, :]
    cos_part = powers @ (1.0 / _EVEN_FACTORIALS)
    sin_part = times * (powers @ (1.0 / _ODD_FACTORIALS))
    return cos_part, sin_part


def damped_kernels(params: ModelParams, t: ArrayLike) -> DampedBasisPair:
    """
    Evaluate the damped kernels c(t) and s(t)

    Args:
        params: Model parameters
        t: Time or 1-D array of times (>= 0)

    Returns:
        DampedBasisPair with c(0) = 1 and s(0) = 0 in every regime
    """
    times, scalar = _as_times(t)
    gamma = params.gamma
    delta = params.omega ** 2 - 0.25 * gamma ** 2
    frequency = effective_frequency(params)
    half_gamma = 0.5 * gamma

    if frequency.regime is Regime.CRITICAL:
        envelope = np.exp(-half_gamma * times)
        c, s = envelope, envelope * times
    elif frequency.regime is Regime.UNDERDAMPED:
        w = frequency.value
        envelope = np.exp(-half_gamma * times)
        c = envelope * np.cos(w * times)
        s = envelope * np.sin(w * times) / w
    else:
        # Split cosh/sinh into two exponentials so large t cannot overflow
        w = frequency.value
        slow = np.exp((w - half_gamma) * times)
        fast = np.exp((-w - half_gamma) * times)
        c = 0.5 * (slow + fast)
        s = 0.5 * (slow - fast) / w

    if frequency.regime is not Regime.CRITICAL and abs(delta) <= SERIES_BAND:
        near = abs(delta) * times ** 2 <= SERIES_REACH
        if np.any(near):
            envelope = np.exp(-half_gamma * times[near])
            cos_part, sin_part = _series_kernels(delta, times[near])
            c = np.array(c, dtype=float)
            s = np.array(s, dtype=float)
            c[near] = envelope * cos_part
            s[near] = envelope * sin_part

    return DampedBasisPair(c=_output(np.asarray(c), scalar), s=_output(np.asarray(s), scalar))


def phi_x2(params: ModelParams, t: ArrayLike) -> ArrayLike:
    """Phi^x_2(t) = -omega s(t)"""
    return -params.omega * damped_kernels(params, t).s


def phi_x3(params: ModelParams, t: ArrayLike) -> ArrayLike:
    """Phi^x_3(t) = c(t) + (gamma/2) s(t)"""
    kernels = damped_kernels(params, t)
    return kernels.c + 0.5 * params.gamma * kernels.s


def phi_y1(params: ModelParams, t: ArrayLike) -> ArrayLike:
    """Phi^y_1(t) = c(t) - (gamma/2) s(t)"""
    kernels = damped_kernels(params, t)
    return kernels.c - 0.5 * params.gamma * kernels.s


def phi_y3(params: ModelParams, t: ArrayLike) -> ArrayLike:
    """Phi^y_3(t) = c(t) + (gamma/2) s(t); the same function as Phi^x_3"""
    kernels = damped_kernels(params, t)
    return kernels.c + 0.5 * params.gamma * kernels.s


def _bloch_components(
    kind: ModelKind,
    params: ModelParams,
    theta_I: float,
    times: np.ndarray
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Closed-form (vx, vy, vz) in the sigma_z Bloch frame"""
    omega, gamma = params.omega, params.gamma
    sin_i, cos_i = math.sin(theta_I), math.cos(theta_I)
    decay = np.exp(-gamma * times)
    zeros = np.zeros_like(times)

    if kind is ModelKind.M1Z:
        return (decay * np.cos(omega * times) * sin_i,
                decay * np.sin(omega * times) * sin_i,
                np.full_like(times, cos_i))

    if kind is ModelKind.M1X:
        # M1z dynamics in the frame relabeled (x, y, z) -> (y, z, x)
        return (np.full_like(times, sin_i),
                -decay * np.sin(omega * times) * cos_i,
                decay * np.cos(omega * times) * cos_i)

    if kind is ModelKind.M1Y:
        # M1z dynamics in the frame relabeled (x, y, z) -> (z, x, y)
        return (decay * np.sin(omega * times + theta_I),
                zeros,
                decay * np.cos(omega * times + theta_I))

    kernels = damped_kernels(params, times)
    c, s = kernels.c, kernels.s
    if kind is ModelKind.M2:
        return (decay * sin_i,
                -omega * s * cos_i,
                (c + 0.5 * gamma * s) * cos_i)

    if kind is ModelKind.M3:
        return ((c - 0.5 * gamma * s) * sin_i - omega * s * cos_i,
                zeros,
                (c + 0.5 * gamma * s) * cos_i + omega * s * sin_i)

    raise ValueError(f"Unsupported model kind: {kind}")


def bloch_trajectory(kind: ModelKind, params: ModelParams, theta_I: float, t: float) -> BlochVector:
    """
    Exact Bloch vector at time t for the pure initial state with angle theta_I

    Args:
        kind: Model variant
        params: Model parameters
        theta_I: Preparation angle (rad)
        t: Time (>= 0)

    Returns:
        BlochVector in the sigma_z frame
    """
    times, _ = _as_times(t)
    if times.size != 1:
        raise ValueError("bloch_trajectory takes a single time; use bloch_path for arrays")
    vx, vy, vz = _bloch_components(ModelKind(kind), params, theta_I, times)
    return BlochVector(float(vx[0]), float(vy[0]), float(vz[0]))


def bloch_path(kind: ModelKind, params: ModelParams, theta_I: float, times) -> np.ndarray:
    """Trajectory sampled at times, as an (n, 3) array of (vx, vy, vz)"""
    times, _ = _as_times(times)
    return np.column_stack(_bloch_components(ModelKind(kind), params, theta_I, times))


def trace_m1z(params: ModelParams, geom: ExperimentGeometry, t: ArrayLike) -> ArrayLike:
    """p(t) = e^{-gamma t} cos(omega t) sin(theta_I) sin(theta_M) + cos(theta_I) cos(theta_M)"""
    times, scalar = _as_times(t)
    visibility = math.sin(geom.theta_I) * math.sin(geom.theta_M)
    offset = math.cos(geom.theta_I) * math.cos(geom.theta_M)
    values = np.exp(-params.gamma * times) * np.cos(params.omega * times) * visibility + offset
    return _output(values, scalar)


def trace_m1x(params: ModelParams, geom: ExperimentGeometry, t: ArrayLike) -> ArrayLike:
    """p(t) = e^{-gamma t} cos(omega t) cos(theta_I) cos(theta_M) + sin(theta_I) sin(theta_M)"""
    times, scalar = _as_times(t)
    visibility = math.cos(geom.theta_I) * math.cos(geom.theta_M)
    offset = math.sin(geom.theta_I) * math.sin(geom.theta_M)
    values = np.exp(-params.gamma * times) * np.cos(params.omega * times) * visibility + offset
    return _output(values, scalar)


def trace_m1y(params: ModelParams, geom: ExperimentGeometry, t: ArrayLike) -> ArrayLike:
    """p(t) = e^{-gamma t} cos(omega t + theta_I - theta_M)"""
    times, scalar = _as_times(t)
    phase = geom.theta_I - geom.theta_M
    values = np.exp(-params.gamma * times) * np.cos(params.omega * times + phase)
    return _output(values, scalar)


def trace_m2(params: ModelParams, geom: ExperimentGeometry, t: ArrayLike) -> ArrayLike:
    """p(t) = e^{-gamma t} sin(theta_I) sin(theta_M) + Phi^x_3(t) cos(theta_I) cos(theta_M)"""
    times, scalar = _as_times(t)
    transverse = math.sin(geom.theta_I) * math.sin(geom.theta_M)
    longitudinal = math.cos(geom.theta_I) * math.cos(geom.theta_M)
    values = np.exp(-params.gamma * times) * transverse + phi_x3(params, times) * longitudinal
    return _output(values, scalar)


def trace_m3(params: ModelParams, geom: ExperimentGeometry, t: ArrayLike) -> ArrayLike:
    """p(t) = alpha_1 c(t) + alpha_2' s(t) with the omega-hat-free coefficient alpha_2'"""
    times, scalar = _as_times(t)
    alpha_1 = math.cos(geom.theta_I - geom.theta_M)
    alpha_2 = (0.5 * params.gamma * math.cos(geom.theta_I + geom.theta_M)
               + params.omega * math.sin(geom.theta_I - geom.theta_M))
    kernels = damped_kernels(params, times)
    return _output(alpha_1 * kernels.c + alpha_2 * kernels.s, scalar)


TRACE_FUNCTIONS: Dict[ModelKind, Callable[[ModelParams, ExperimentGeometry, ArrayLike], ArrayLike]] = {
    ModelKind.M1Z: trace_m1z,
    ModelKind.M1X: trace_m1x,
    ModelKind.M1Y: trace_m1y,
    ModelKind.M2: trace_m2,
    ModelKind.M3: trace_m3,
}


def trace(kind: ModelKind, params: ModelParams, geom: ExperimentGeometry, t: ArrayLike) -> ArrayLike:
    """
    Measurement trace p(t) = Tr[M rho(t)] for any model variant

    Args:
        kind: Model variant
        params: Model parameters
        geom: Preparation/measurement geometry
        t: Time or 1-D array of times (>= 0)

    Returns:
        p(t) in [-1, 1]; float for scalar t, array otherwise
    """
    return TRACE_FUNCTIONS[ModelKind(kind)](params, geom, t)


def x_basis_geometry(geom: ExperimentGeometry) -> ExperimentGeometry:
    """Angles seen from the sigma_x eigenbasis: theta -> pi/2 - theta"""
    return ExperimentGeometry(0.5 * math.pi - geom.theta_I, 0.5 * math.pi - geom.theta_M)


# Cyclic relabelings that carry the joint H/V axis onto z
_FRAME_PERMUTATIONS = {
    ModelKind.M1Z: (0, 1, 2),
    ModelKind.M1X: (1, 2, 0),
    ModelKind.M1Y: (2, 0, 1),
}


def rotated_frame_trace(kind: ModelKind, params: ModelParams, geom: ExperimentGeometry, t: ArrayLike) -> ArrayLike:
    """
    Trace of a jointly diagonal model computed by a change of Bloch frame

    The initial vector is relabeled so that the joint H/V axis becomes z, the
    M1z solution is applied to the general vector, and the result is relabeled
    back before projecting on the measurement axis. Independent of the direct
    formulas, so it serves as a cross-check for M1x and M1y.
    """
    kind = ModelKind(kind)
    if kind not in _FRAME_PERMUTATIONS:
        raise ValueError(f"{kind.value} has no jointly diagonal H and V")
    times, scalar = _as_times(t)
    order = list(_FRAME_PERMUTATIONS[kind])

    start = BlochVector.initial_state(geom.theta_I).as_array()[order]
    decay = np.exp(-params.gamma * times)
    cos_wt, sin_wt = np.cos(params.omega * times), np.sin(params.omega * times)
    rotated = np.column_stack([
        decay * (cos_wt * start[0] - sin_wt * start[1]),
        decay * (sin_wt * start[0] + cos_wt * start[1]),
        np.full_like(times, start[2]),
    ])
    original = np.empty_like(rotated)
    original[:, order] = rotated

    axis = np.array([math.sin(geom.theta_M), 0.0, math.cos(geom.theta_M)])
    return _output(original @ axis, scalar)
