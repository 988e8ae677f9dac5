"""
Identifiability Service
Closed-form identifiability rules per model and geometry, and numerical profile scans
"""

import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np

from ..physics.types import ExperimentGeometry, ModelKind
from ..utils.config import DiscriminatorConfig
from .experiment_sim import MeasurementTrace
from .fitting import FitProblem, local_fit, multistart_fit, select_best
from .reports import FitReport, Identifiability, IdentifiabilityEntry, ProfilePoint

logger = logging.getLogger(__name__)

PROFILED_PARAMETERS = ("omega", "gamma")

# Trigonometric factors below this count as exact zeros (1.5708 reads as pi/2)
TRIG_ZERO = 1e-4


def _is_zero(value: float) -> bool:
    return abs(value) < TRIG_ZERO


def _entries(omega: Identifiability, gamma: Identifiability, reason: str) -> Dict[str, IdentifiabilityEntry]:
    return {
        "omega": IdentifiabilityEntry(status=omega, reason=reason),
        "gamma": IdentifiabilityEntry(status=gamma, reason=reason),
    }


def identifiability_report(kind: ModelKind, geom: ExperimentGeometry) -> Dict[str, IdentifiabilityEntry]:
    """
    Which of omega and gamma the measured trace can determine

    Args:
        kind: Model structure
        geom: Preparation and measurement angles

    Returns:
        Entries keyed 'omega' then 'gamma', each with a status and a short reason
    """
    kind = ModelKind(kind)
    sin_i, cos_i = math.sin(geom.theta_I), math.cos(geom.theta_I)
    sin_m, cos_m = math.sin(geom.theta_M), math.cos(geom.theta_M)
    ok, none = Identifiability.IDENTIFIED, Identifiability.UNIDENTIFIED

    if kind is ModelKind.M1Z:
        if _is_zero(sin_i * sin_m):
            return _entries(none, none, "sin(theta_I) sin(theta_M) = 0: only the conserved z component is seen")
        return _entries(ok, ok, "transverse preparation and measurement see the precession and its decay")

    if kind is ModelKind.M1X:
        if _is_zero(cos_i * cos_m):
            return _entries(none, none, "cos(theta_I) cos(theta_M) = 0: only the conserved x component is seen")
        return _entries(ok, ok, "the y-z plane components carry the precession and its decay")

    if kind is ModelKind.M1Y:
        return _entries(ok, ok, "every preparation in the x-z plane precesses and decays")

    if kind is ModelKind.M2:
        if not _is_zero(cos_i) and not _is_zero(cos_m):
            return _entries(ok, ok, "the z component carries the damped oscillation")
        if not _is_zero(sin_i * sin_m):
            return {
                "omega": IdentifiabilityEntry(
                    status=none,
                    reason="cos(theta_I) cos(theta_M) = 0: only the x component is seen, it decays as exp(-gamma t)",
                ),
                "gamma": IdentifiabilityEntry(
                    status=ok,
                    reason="the x component decays as exp(-gamma t)",
                ),
            }
        return _entries(none, none, "both the x and z contributions vanish: the trace is identically zero")

    return _entries(ok, ok, "the measured combination always carries the damped oscillation")


def default_profile_grid(param: str, value: float, t_max: float, points: int) -> np.ndarray:
    """value +/- max(0.5 |value|, 1/t_max) on `points` nodes, gamma clipped at zero"""
    half_width = max(0.5 * abs(value), 1.0 / max(t_max, 1e-12))
    low, high = value - half_width, value + half_width
    if param == "gamma":
        low = max(low, 0.0)
    return np.linspace(low, high, points)


def named_from_report(problem: FitProblem, report: FitReport) -> Dict[str, float]:
    """Fit report values in the problem's parameter names"""
    named = {
        "omega": report.params_hat.omega,
        "gamma": report.params_hat.gamma,
        "theta_I": report.geom_hat.theta_I,
        "theta_M": report.geom_hat.theta_M,
    }
    named["phase"] = named["theta_I"] - named["theta_M"]
    return named


def profile_points(
    problem: FitProblem,
    param: str,
    grid: Sequence[float],
    best_named: Dict[str, float]
) -> List[ProfilePoint]:
    """
    Minimum rss over the other parameters at each grid value of `param`

    Each point is warm-started from the best fit and from the previous point.
    """
    if param not in PROFILED_PARAMETERS:
        raise ValueError(f"Can only profile omega or gamma, got '{param}'")

    points = []
    previous: Optional[Dict[str, float]] = None
    for value in grid:
        fixed_problem = problem.with_fixed(param, float(value))
        seeds = [best_named] + ([previous] if previous is not None else [])
        results = [
            local_fit(fixed_problem, fixed_problem.coordinates({**seed, param: float(value)}), index)
            for index, seed in enumerate(seeds)
        ]
        best = select_best(results)
        previous = fixed_problem.values(best.x)
        points.append(ProfilePoint(value=float(value), rss=float(best.rss)))
    return points


def classify_profile(points: Sequence[ProfilePoint], rss_min: float, n_points: int,
                     config: DiscriminatorConfig) -> Identifiability:
    """Flat profile: unidentified; rise below the weak threshold: weakly identified"""
    values = [point.rss for point in points if math.isfinite(point.rss)]
    if not values:
        return Identifiability.UNIDENTIFIED
    spread = max(values) - min(values)
    if spread <= config.tol_flat * max(rss_min, 1e-12 * n_points):
        return Identifiability.UNIDENTIFIED
    if spread < config.weak_threshold:
        return Identifiability.WEAKLY_IDENTIFIED
    return Identifiability.IDENTIFIED


def compute_profile_flags(problem: FitProblem, best_named: Dict[str, float],
                          rss_min: float) -> Dict[str, Identifiability]:
    """Profile omega and gamma around the best fit and classify each"""
    config = problem.config
    flags = {}
    for param in PROFILED_PARAMETERS:
        grid = default_profile_grid(param, best_named[param], problem.trace.t_max, config.profile_points)
        points = profile_points(problem, param, grid, best_named)
        flags[param] = classify_profile(points, rss_min, len(problem.trace), config)
        logger.debug(f"[PROFILE] {problem.kind.value} {param}: {flags[param].value}")
    return flags


def profile_scan(
    kind: ModelKind,
    trace: MeasurementTrace,
    param: str,
    grid: Optional[Sequence[float]] = None,
    fixed_geom: Optional[ExperimentGeometry] = None,
    config: Optional[DiscriminatorConfig] = None,
    start: Optional[FitReport] = None
) -> List[ProfilePoint]:
    """
    Profile the weighted rss of one model along omega or gamma

    Args:
        kind: Model to fit
        trace: Measurement record
        param: 'omega' or 'gamma'
        grid: Values to scan (default: centered on the best fit)
        fixed_geom: Known geometry, or None to refit the angles
        config: Optimizer settings
        start: Existing best fit to warm-start from; refitted when None

    Returns:
        One ProfilePoint per grid value, in grid order
    """
    config = config or DiscriminatorConfig()
    problem = FitProblem(ModelKind(kind), trace, fixed_geom, config)
    if param not in PROFILED_PARAMETERS:
        raise ValueError(f"Can only profile omega or gamma, got '{param}'")

    if start is not None:
        best_named = named_from_report(problem, start)
    else:
        best, _ = multistart_fit(problem)
        best_named = problem.values(best.x)

    if grid is None:
        grid = default_profile_grid(param, best_named[param], trace.t_max, config.profile_points)
    grid = [float(value) for value in grid]
    if param == "gamma" and any(value < 0 for value in grid):
        raise ValueError("gamma grid values must be >= 0")

    logger.info(f"[PROFILE] {problem.kind.value} {param}: {len(grid)} points")
    return profile_points(problem, param, grid, best_named)
