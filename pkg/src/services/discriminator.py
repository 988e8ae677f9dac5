"""
Discriminator Service
Fits each candidate model to a trace and picks one by information criterion
"""

import logging
import math
from typing import Iterable, Optional, Union

from ..physics.types import ExperimentGeometry, ModelKind
from ..utils.config import DiscriminatorConfig
from ..utils.errors import FitContractError
from .experiment_sim import MeasurementTrace
from .fitting import FitProblem, canonical_values, information_criterion, multistart_fit
from .identifiability import compute_profile_flags
from .reports import (
    Degeneracy,
    DiscriminationReport,
    FitReport,
    FittedGeometry,
    FittedParams,
    Verdict,
)

logger = logging.getLogger(__name__)


def fit_model(
    kind: ModelKind,
    trace: MeasurementTrace,
    fixed_geom: Optional[ExperimentGeometry] = None,
    config: Optional[DiscriminatorConfig] = None
) -> FitReport:
    """
    Fit one model to a trace by multi-start weighted least squares

    Args:
        kind: Candidate model
        trace: Measurement record
        fixed_geom: Known preparation/measurement angles; fitted when None
        config: Optimizer and profiling settings

    Returns:
        FitReport with the best optimum found and its information criterion

    Raises:
        FitContractError: If the trace has fewer points than free parameters + 1
    """
    kind = ModelKind(kind)
    config = config or DiscriminatorConfig()
    problem = FitProblem(kind, trace, fixed_geom, config)
    best, results = multistart_fit(problem)

    named = problem.values(best.x)
    values = canonical_values(problem, named)
    if fixed_geom is not None:
        geom_hat = FittedGeometry(theta_I=fixed_geom.theta_I, theta_M=fixed_geom.theta_M, fixed=True)
    elif kind is ModelKind.M1Y:
        geom_hat = FittedGeometry(theta_I=values["phase"], theta_M=0.0, fixed=False)
    else:
        geom_hat = FittedGeometry(theta_I=values["theta_I"], theta_M=values["theta_M"], fixed=False)

    rss = problem.rss(named)
    if not math.isfinite(rss):
        rss = best.rss
    n_points = len(trace)
    n_params = problem.n_model_params

    flags = {}
    if config.compute_profile_flags:
        flags = compute_profile_flags(problem, named, rss)

    return FitReport(
        kind=kind,
        params_hat=FittedParams(omega=values["omega"], gamma=values["gamma"]),
        geom_hat=geom_hat,
        rss=rss,
        rss_unweighted=problem.rss_unweighted(named),
        n_points=n_points,
        n_free_params=n_params,
        information_criterion=information_criterion(rss, n_points, n_params),
        converged=best.converged,
        starts_converged=sum(result.converged for result in results),
        evaluations=sum(result.evaluations for result in results),
        profile_flags=flags,
    )


def is_degenerate_geometry(theta_I: float, theta_M: float, tol_deg: float) -> bool:
    """Both sin(theta_I) sin(theta_M) and cos(theta_I) cos(theta_M) vanish"""
    return (abs(math.sin(theta_I) * math.sin(theta_M)) < tol_deg
            and abs(math.cos(theta_I) * math.cos(theta_M)) < tol_deg)


def discriminate(
    trace: MeasurementTrace,
    candidates: Iterable[Union[ModelKind, str]],
    fixed_geom: Optional[ExperimentGeometry] = None,
    config: Optional[DiscriminatorConfig] = None
) -> DiscriminationReport:
    """
    Fit every candidate and select the lowest information criterion

    The verdict is inconclusive when the runner-up is within `bic_margin` of
    the winner. A geometry that hides both the x-like and z-like signal is
    flagged as degenerate whatever the verdict. Fits follow the candidate
    order; a set of candidates is fitted in ModelKind order.

    Raises:
        FitContractError: With fewer than two distinct candidates
    """
    config = config or DiscriminatorConfig()
    kinds = []
    for candidate in candidates:
        kind = ModelKind.parse(candidate) if isinstance(candidate, str) else ModelKind(candidate)
        if kind not in kinds:
            kinds.append(kind)
    if isinstance(candidates, (set, frozenset)):
        # Sets carry no order; fit them in declaration order
        declared = list(ModelKind)
        kinds.sort(key=declared.index)
    if len(kinds) < 2:
        raise FitContractError(f"discrimination needs at least two distinct candidates, got {len(kinds)}")

    logger.info(f"[FIT] Discriminating {', '.join(kind.value for kind in kinds)} on {len(trace)} points")
    fits = [fit_model(kind, trace, fixed_geom, config) for kind in kinds]

    ranked = sorted(range(len(fits)), key=lambda index: (fits[index].information_criterion, index))
    winner, runner_up = fits[ranked[0]], fits[ranked[1]]
    if runner_up.information_criterion - winner.information_criterion < config.bic_margin:
        verdict = Verdict.INCONCLUSIVE
    else:
        verdict = winner.kind

    degeneracy = None
    if fixed_geom is not None:
        geometry = (fixed_geom.theta_I, fixed_geom.theta_M)
    elif winner.kind is ModelKind.M1Y:
        # M1y only fits theta_I - theta_M, and its signal never vanishes
        geometry = None
    else:
        geometry = (winner.geom_hat.theta_I, winner.geom_hat.theta_M)
    if geometry is not None and is_degenerate_geometry(*geometry, config.tol_deg):
        degeneracy = Degeneracy.DEGENERATE_GEOMETRY

    verdict_name = verdict.value
    logger.info(f"[FIT] Verdict: {verdict_name}" + (" (degenerate geometry)" if degeneracy else ""))
    return DiscriminationReport(fits=fits, verdict=verdict, degeneracy=degeneracy, bic_margin=config.bic_margin)
