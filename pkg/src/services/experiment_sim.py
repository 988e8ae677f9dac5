"""
Experiment Simulation Service
Synthetic measurement records: repeated preparation, delay, binary projective measurement
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np

from ..physics.model_core import trace
from ..physics.types import ExperimentGeometry, ModelKind, ModelParams
from ..utils.errors import NumericalFailure, TraceValidationError

logger = logging.getLogger(__name__)

RNG_NAME = f"numpy.random.Philox/numpy-{np.__version__}"
PROBABILITY_TOLERANCE = 1e-9
LATTICE_TOLERANCE = 1e-6
DEFAULT_POINTS = 50


@dataclass(frozen=True)
class TraceMeta:
    """How a synthetic trace was generated; every field is optional for imported data"""
    kind: Optional[ModelKind] = None
    omega: Optional[float] = None
    gamma: Optional[float] = None
    theta_I: Optional[float] = None
    theta_M: Optional[float] = None
    seed: Optional[int] = None
    rng: Optional[str] = None

    def to_dict(self) -> dict:
        data = {
            "kind": self.kind.value if self.kind is not None else None,
            "omega": self.omega,
            "gamma": self.gamma,
            "theta_I": self.theta_I,
            "theta_M": self.theta_M,
            "seed": self.seed,
            "rng": self.rng,
        }
        return {key: value for key, value in data.items() if value is not None}

    @classmethod
    def from_dict(cls, data: dict) -> "TraceMeta":
        kind = data.get("kind")
        return cls(
            kind=ModelKind.parse(kind) if kind is not None else None,
            omega=data.get("omega"),
            gamma=data.get("gamma"),
            theta_I=data.get("theta_I"),
            theta_M=data.get("theta_M"),
            seed=data.get("seed"),
            rng=data.get("rng"),
        )


@dataclass(frozen=True)
class MeasurementTrace:
    """
    Shot-averaged outcomes p_hat(t_i) with their shot counts

    Invariants: times strictly increasing and >= 0; estimates in [-1, 1];
    shots >= 1; each estimate sits on the lattice -1 + 2k/shots unless the
    trace is exact (noiseless expectation values).
    """
    times: np.ndarray
    estimates: np.ndarray
    shots: np.ndarray
    meta: Optional[TraceMeta] = None
    exact: bool = False

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        estimates = np.asarray(self.estimates, dtype=float).reshape(-1)
        shots = np.asarray(self.shots).reshape(-1)
        if shots.size == 1 and times.size > 1:
            shots = np.full(times.size, shots[0])

        if not (times.size == estimates.size == shots.size):
            raise TraceValidationError(
                f"times, estimates and shots must have equal length "
                f"({times.size}, {estimates.size}, {shots.size})"
            )
        if times.size == 0:
            raise TraceValidationError("a trace needs at least one point")
        if not np.all(np.isfinite(times)) or not np.all(np.isfinite(estimates)):
            raise TraceValidationError("times and estimates must be finite")
        if np.any(times < 0):
            raise TraceValidationError("times must be >= 0")
        if np.any(np.diff(times) <= 0):
            index = int(np.argmax(np.diff(times) <= 0)) + 1
            raise TraceValidationError(f"times must be strictly increasing (point {index})")
        if np.any(np.abs(estimates) > 1.0 + PROBABILITY_TOLERANCE):
            raise TraceValidationError("estimates must lie in [-1, 1]")
        if not np.all(np.equal(np.mod(shots, 1), 0)) or np.any(shots < 1):
            raise TraceValidationError("shots must be positive integers")
        shots = shots.astype(np.int64)

        if not self.exact:
            counts = (estimates + 1.0) * shots / 2.0
            off_lattice = np.abs(counts - np.round(counts)) > LATTICE_TOLERANCE
            if np.any(off_lattice):
                index = int(np.argmax(off_lattice))
                raise TraceValidationError(
                    f"estimate {estimates[index]!r} at point {index} is not a multiple of "
                    f"2/{shots[index]} away from -1"
                )

        for name, value in (("times", times), ("estimates", estimates), ("shots", shots)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)

    def __len__(self) -> int:
        return int(self.times.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, MeasurementTrace):
            return NotImplemented
        return (np.array_equal(self.times, other.times)
                and np.array_equal(self.estimates, other.estimates)
                and np.array_equal(self.shots, other.shots)
                and self.meta == other.meta
                and self.exact == other.exact)

    __hash__ = None

    @property
    def t_max(self) -> float:
        return float(self.times[-1])

    def scaled_shots(self, factor: int) -> "MeasurementTrace":
        """Same estimates with every shot count multiplied by an integer factor"""
        if int(factor) != factor or factor < 1:
            raise ValueError(f"factor must be a positive integer, got {factor}")
        return MeasurementTrace(self.times, self.estimates, self.shots * int(factor),
                                self.meta, exact=self.exact)


def auto_time_grid(params: ModelParams, points: int = DEFAULT_POINTS) -> np.ndarray:
    """
    Default delays: `points` uniform samples on [0, 3 max(1/gamma, 2 pi / max(|omega|, gamma))]

    gamma = 0 drops the decay scale.

    Raises:
        ValueError: If omega and gamma are both zero or points < 2
    """
    if points < 2:
        raise ValueError(f"points must be >= 2, got {points}")
    omega, gamma = abs(params.omega), params.gamma
    if omega == 0 and gamma == 0:
        raise ValueError("auto grid needs a nonzero omega or gamma")
    scales = [2.0 * math.pi / max(omega, gamma)]
    if gamma > 0:
        scales.append(1.0 / gamma)
    return np.linspace(0.0, 3.0 * max(scales), points)


def _meta_for(kind: ModelKind, params: ModelParams, geom: ExperimentGeometry, seed: Optional[int]) -> TraceMeta:
    return TraceMeta(
        kind=ModelKind(kind),
        omega=params.omega,
        gamma=params.gamma,
        theta_I=geom.theta_I,
        theta_M=geom.theta_M,
        seed=seed,
        rng=RNG_NAME if seed is not None else None,
    )


def _success_probabilities(p: np.ndarray) -> np.ndarray:
    worst = float(np.max(np.abs(p))) if p.size else 0.0
    if worst > 1.0 + PROBABILITY_TOLERANCE:
        logger.error(f"[SAMPLE] Model produced |p|={worst!r} > 1")
        raise NumericalFailure(f"model trace left [-1, 1] (|p| = {worst!r})")
    return np.clip(0.5 * (1.0 + p), 0.0, 1.0)


def make_rng(seed: int) -> np.random.Generator:
    """Counter-based generator used for every synthetic trace"""
    return np.random.Generator(np.random.Philox(seed))


def sample_trace(
    kind: ModelKind,
    params: ModelParams,
    geom: ExperimentGeometry,
    times: Sequence[float],
    shots: Union[int, Sequence[int]],
    seed: int
) -> MeasurementTrace:
    """
    Simulate a finite-shot measurement record

    For each delay t, k ~ Binomial(shots, (1 + p(t))/2) and p_hat = 2k/shots - 1.

    Args:
        kind: Generating model
        params: Model parameters
        geom: Preparation/measurement geometry
        times: Strictly increasing delays (>= 0)
        shots: Shots per point (int or one per time)
        seed: Seed for the Philox generator

    Returns:
        MeasurementTrace with generation metadata

    Raises:
        NumericalFailure: If the model trace leaves [-1, 1]
    """
    times = np.asarray(times, dtype=float)
    shot_counts = np.broadcast_to(np.asarray(shots), times.shape).astype(np.int64)
    if np.any(shot_counts < 1):
        raise ValueError("shots must be >= 1")

    p = np.asarray(trace(kind, params, geom, times), dtype=float)
    rng = make_rng(seed)
    counts = rng.binomial(shot_counts, _success_probabilities(p))
    estimates = 2.0 * counts / shot_counts - 1.0

    logger.info(f"[SAMPLE] {ModelKind(kind).value}: {times.size} points, seed={seed}")
    return MeasurementTrace(times, estimates, shot_counts, _meta_for(kind, params, geom, seed))


def noiseless_trace(
    kind: ModelKind,
    params: ModelParams,
    geom: ExperimentGeometry,
    times: Sequence[float],
    shots: Union[int, Sequence[int]] = 1000
) -> MeasurementTrace:
    """Exact expectation values p(t); `shots` only sets the fit weights"""
    times = np.asarray(times, dtype=float)
    p = np.asarray(trace(kind, params, geom, times), dtype=float)
    return MeasurementTrace(times, np.clip(p, -1.0, 1.0), shots,
                            _meta_for(kind, params, geom, None), exact=True)
