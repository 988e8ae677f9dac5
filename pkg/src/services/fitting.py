"""
Weighted least-squares machinery shared by fitting, profiling and discrimination

The objective is sum_i w_i (p_hat_i - p_model(t_i))^2 with binomial weights
w_i = shots_i / (1 - p_hat_i^2 + 1/(4 shots_i)). gamma is optimized as u with
gamma = u^2, so every point of parameter space is physical.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import least_squares
from scipy.signal import lombscargle

from ..physics.model_core import trace as model_trace
from ..physics.types import ExperimentGeometry, ModelKind, ModelParams, reduce_angle
from ..utils.config import DiscriminatorConfig
from ..utils.errors import FitContractError
from .experiment_sim import MeasurementTrace

logger = logging.getLogger(__name__)

# Kinds whose trace depends on omega only through omega^2
EVEN_IN_OMEGA = frozenset({ModelKind.M1Z, ModelKind.M1X, ModelKind.M2})

# Starting angles when the geometry is free; offset from multiples of pi/4
# so no start sits on a stationary point of the angle dependence
_ANGLE_SEEDS = (math.pi / 8, 3 * math.pi / 8, 5 * math.pi / 8, 7 * math.pi / 8)

PARAMETER_XTOL = 1e-12
GRADIENT_TOL = 1e-12


def binomial_weights(trace: MeasurementTrace) -> np.ndarray:
    """Inverse binomial variance per point, floored at 1/(4 shots) to stay finite at |p| = 1"""
    shots = trace.shots.astype(float)
    return shots / (1.0 - trace.estimates ** 2 + 1.0 / (4.0 * shots))


@dataclass(frozen=True)
class LocalResult:
    """Outcome of one local optimization"""
    x: np.ndarray
    rss: float
    converged: bool
    evaluations: int
    start_index: int = 0


@dataclass
class FitProblem:
    """
    One candidate model fitted to one trace

    Free coordinates are ordered as in `free_names`. Possible names are
    omega, gamma (optimized as sqrt(gamma)), theta_I, theta_M and, for M1y
    with free geometry, phase = theta_I - theta_M (the only angle M1y sees).
    """
    kind: ModelKind
    trace: MeasurementTrace
    fixed_geom: Optional[ExperimentGeometry]
    config: DiscriminatorConfig
    fixed: Dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        self.kind = ModelKind(self.kind)
        self.times = np.asarray(self.trace.times, dtype=float)
        self.estimates = np.asarray(self.trace.estimates, dtype=float)
        self.weights = binomial_weights(self.trace)
        self.sqrt_weights = np.sqrt(self.weights)

    @property
    def model_names(self) -> Tuple[str, ...]:
        """All parameters of the model, fixed or not"""
        if self.fixed_geom is not None:
            return ("omega", "gamma")
        if self.kind is ModelKind.M1Y:
            return ("omega", "gamma", "phase")
        return ("omega", "gamma", "theta_I", "theta_M")

    @property
    def free_names(self) -> Tuple[str, ...]:
        return tuple(name for name in self.model_names if name not in self.fixed)

    @property
    def n_model_params(self) -> int:
        return len(self.model_names)

    def with_fixed(self, name: str, value: float) -> "FitProblem":
        fixed = dict(self.fixed)
        fixed[name] = float(value)
        return FitProblem(self.kind, self.trace, self.fixed_geom, self.config, fixed)

    def values(self, x: np.ndarray) -> Dict[str, float]:
        """Map free coordinates (plus fixed values) to named model parameters"""
        named = dict(self.fixed)
        for name, value in zip(self.free_names, x):
            named[name] = float(value) ** 2 if name == "gamma" else float(value)
        return named

    def coordinates(self, named: Dict[str, float]) -> np.ndarray:
        """Inverse of `values` for the free coordinates"""
        return np.array([
            math.sqrt(max(named[name], 0.0)) if name == "gamma" else named[name]
            for name in self.free_names
        ], dtype=float)

    def model_inputs(self, named: Dict[str, float]) -> Tuple[ModelParams, ExperimentGeometry]:
        params = ModelParams(named["omega"], named["gamma"])
        if self.fixed_geom is not None:
            geom = self.fixed_geom
        elif "phase" in named:
            geom = ExperimentGeometry(named["phase"], 0.0)
        else:
            geom = ExperimentGeometry(named["theta_I"], named["theta_M"])
        return params, geom

    def prediction(self, named: Dict[str, float]) -> np.ndarray:
        params, geom = self.model_inputs(named)
        return np.asarray(model_trace(self.kind, params, geom, self.times), dtype=float)

    def residuals(self, x: np.ndarray) -> np.ndarray:
        return self.sqrt_weights * (self.estimates - self.prediction(self.values(x)))

    def rss(self, named: Dict[str, float]) -> float:
        diff = self.estimates - self.prediction(named)
        return float(np.sum(self.weights * diff ** 2))

    def rss_unweighted(self, named: Dict[str, float]) -> float:
        diff = self.estimates - self.prediction(named)
        return float(np.sum(diff ** 2))


def local_fit(problem: FitProblem, x0: np.ndarray, start_index: int = 0) -> LocalResult:
    """
    Trust-region least squares from one start

    Honors the relative rss tolerance and the evaluation budget from the config.
    With no free coordinates the fixed point is simply evaluated.
    """
    x0 = np.asarray(x0, dtype=float)
    if x0.size == 0:
        return LocalResult(x0, problem.rss(problem.values(x0)), True, 1, start_index)
    try:
        result = least_squares(
            problem.residuals,
            x0,
            method="trf",
            x_scale="jac",
            ftol=problem.config.rss_rtol,
            xtol=PARAMETER_XTOL,
            gtol=GRADIENT_TOL,
            max_nfev=problem.config.max_evaluations,
        )
    except (ValueError, FloatingPointError) as e:
        logger.warning(f"[FIT] {problem.kind.value} start {start_index} failed: {e}")
        return LocalResult(x0, math.inf, False, 0, start_index)

    rss = float(np.sum(result.fun ** 2))
    converged = bool(result.status > 0) and math.isfinite(rss)
    return LocalResult(result.x, rss, converged, int(result.nfev), start_index)


def dominant_frequency(trace: MeasurementTrace) -> float:
    """Angular frequency of the strongest periodogram peak (2 pi / t_max for flat traces)"""
    times = trace.times
    span = float(times[-1] - times[0])
    if times.size < 3 or span <= 0:
        return 1.0
    fundamental = 2.0 * math.pi / span
    centered = trace.estimates - np.mean(trace.estimates)
    if np.allclose(centered, 0.0):
        return fundamental
    nyquist = math.pi / float(np.min(np.diff(times)))
    grid = np.linspace(0.5 * fundamental, max(nyquist, fundamental), 512)
    power = lombscargle(times, centered, grid)
    return float(grid[int(np.argmax(power))])


def starting_points(problem: FitProblem) -> List[np.ndarray]:
    """
    Deterministic multi-start design

    omega: dominant periodogram frequency times {0.5, 1, 2}, then uniform random
    draws up to Nyquist (signed for kinds odd in omega); gamma: log-spaced on
    [0.01, 10]/t_max in shuffled order; angles on a coarse grid when free.
    """
    config = problem.config
    rng = np.random.Generator(np.random.Philox(config.seed))
    starts = config.starts
    t_max = max(problem.trace.t_max, 1e-12)

    omega_dom = dominant_frequency(problem.trace)
    omega_seeds = [factor * omega_dom for factor in (1.0, 0.5, 2.0)]
    if problem.kind not in EVEN_IN_OMEGA:
        omega_seeds += [-value for value in omega_seeds]
    spacing = np.diff(problem.times)
    nyquist = math.pi / float(np.min(spacing)) if spacing.size else 4.0 * omega_dom
    while len(omega_seeds) < starts:
        draw = float(rng.uniform(0.0, nyquist))
        if problem.kind not in EVEN_IN_OMEGA and rng.uniform() < 0.5:
            draw = -draw
        omega_seeds.append(draw)

    gamma_seeds = np.geomspace(0.01, 10.0, starts) / t_max
    gamma_seeds = gamma_seeds[rng.permutation(starts)]

    points = []
    for index in range(starts):
        named = dict(problem.fixed)
        named.setdefault("omega", omega_seeds[index])
        named.setdefault("gamma", float(gamma_seeds[index]))
        named.setdefault("theta_I", _ANGLE_SEEDS[index % 4])
        named.setdefault("theta_M", _ANGLE_SEEDS[(index // 4) % 4])
        named.setdefault("phase", _ANGLE_SEEDS[index % 4] - _ANGLE_SEEDS[(index // 4) % 4])
        points.append(problem.coordinates(named))
    return points


def select_best(results: List[LocalResult]) -> LocalResult:
    """Lowest rss among converged starts (any start if none converged); ties go to the earliest"""
    pool = [result for result in results if result.converged] or list(results)
    return min(pool, key=lambda result: (result.rss, result.start_index))


def multistart_fit(problem: FitProblem, extra_starts: Optional[List[np.ndarray]] = None) -> Tuple[LocalResult, List[LocalResult]]:
    """
    Run every start and reduce in start order

    Returns:
        (best result, all results); results are identical however the starts
        are scheduled across threads.
    """
    n_points = len(problem.trace)
    if n_points < problem.n_model_params + 1:
        raise FitContractError(
            f"{problem.kind.value} needs at least {problem.n_model_params + 1} points, trace has {n_points}"
        )

    starts = starting_points(problem) + list(extra_starts or [])
    workers = min(problem.config.max_workers, len(starts))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda item: local_fit(problem, item[1], item[0]), enumerate(starts)))
    else:
        results = [local_fit(problem, x0, index) for index, x0 in enumerate(starts)]

    best = select_best(results)
    converged = sum(result.converged for result in results)
    logger.info(
        f"[FIT] {problem.kind.value}: best rss={best.rss:.6g} from start {best.start_index} "
        f"({converged}/{len(results)} converged)"
    )
    return best, results


def information_criterion(rss: float, n_points: int, n_params: int) -> float:
    """BIC = n ln(rss/n) + k ln n, with rss floored at 1e-18 n"""
    floored = max(rss, 1e-18 * n_points)
    return n_points * math.log(floored / n_points) + n_params * math.log(n_points)


def canonical_values(problem: FitProblem, named: Dict[str, float]) -> Dict[str, float]:
    """Report form: |omega| for even kinds, angles reduced to [0, 2 pi)"""
    values = dict(named)
    if problem.kind in EVEN_IN_OMEGA:
        values["omega"] = abs(values["omega"])
    for name in ("theta_I", "theta_M", "phase"):
        if name in values:
            values[name] = reduce_angle(values[name])
    return values
