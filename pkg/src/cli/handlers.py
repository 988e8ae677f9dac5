"""
BlochID - Command Handlers
One handler per subcommand; each validates its inputs before computing anything
"""

import logging
from typing import List, Optional

import numpy as np

from ..physics.model_core import bloch_path, trace
from ..physics.propagator_oracle import generator_for_model, propagate_path
from ..physics.types import BlochVector, ExperimentGeometry, ModelKind, ModelParams
from ..services.discriminator import discriminate, fit_model
from ..services.experiment_sim import auto_time_grid, sample_trace
from ..services.identifiability import identifiability_report
from ..services.trace_io import export_trace, import_trace, trace_to_csv_text, trace_to_json_dict
from ..utils.config import DiscriminatorConfig, get_default_seed
from .formatting import emit, output_format, render_columns, render_report
from .parser import UsageError

logger = logging.getLogger(__name__)


# ==================== ARGUMENT HELPERS ====================

def parse_models(raw: str) -> List[ModelKind]:
    kinds = [ModelKind.parse(name) for name in raw.split(",") if name.strip()]
    if not kinds:
        raise UsageError("--model needs at least one model kind")
    return kinds


def parse_times(args, params: ModelParams) -> np.ndarray:
    """--times, else a uniform grid on [0, --t-max], else the automatic grid"""
    if args.points < 2:
        raise UsageError(f"--points must be >= 2, got {args.points}")
    if args.times:
        try:
            return np.array([float(value) for value in args.times.split(",") if value.strip()])
        except ValueError:
            raise UsageError(f"--times must be comma-separated numbers, got '{args.times}'")
    if args.t_max is not None:
        if not args.t_max > 0:
            raise UsageError(f"--t-max must be > 0, got {args.t_max}")
        return np.linspace(0.0, args.t_max, args.points)
    return auto_time_grid(params, args.points)


def parse_geometry(args, required: bool = True) -> Optional[ExperimentGeometry]:
    theta_i = getattr(args, "theta_i", None)
    theta_m = getattr(args, "theta_m", None)
    if theta_i is None and theta_m is None and not required:
        return None
    if theta_i is None or theta_m is None:
        raise UsageError("--theta-i and --theta-m must be given together")
    if args.degrees:
        return ExperimentGeometry.from_degrees(theta_i, theta_m)
    return ExperimentGeometry(theta_i, theta_m)


def preparation_angle(args) -> float:
    return ExperimentGeometry.from_degrees(args.theta_i, 0.0).theta_I if args.degrees else args.theta_i


def load_config(args) -> DiscriminatorConfig:
    if args.config:
        return DiscriminatorConfig.from_json_file(args.config)
    return DiscriminatorConfig()


def fixed_geometry(args, config: DiscriminatorConfig) -> Optional[ExperimentGeometry]:
    """Command-line angles override the config's fixed_geometry"""
    geom = parse_geometry(args, required=False)
    if geom is None and config.fixed_geometry is not None:
        geom = ExperimentGeometry(config.fixed_geometry.theta_I, config.fixed_geometry.theta_M)
    return geom


# ==================== HANDLERS ====================

def handle_trace(args) -> None:
    """Noiseless p(t), one column per requested model"""
    kinds = parse_models(args.model)
    params = ModelParams(args.omega, args.gamma)
    geom = parse_geometry(args)
    times = parse_times(args, params)

    columns = {"time": times}
    if len(kinds) == 1:
        columns["p"] = trace(kinds[0], params, geom, times)
    else:
        for kind in kinds:
            columns[f"p_{kind.value}"] = trace(kind, params, geom, times)
    emit(render_columns(columns, output_format(args.out, args.format)), args.out)


def handle_sample(args) -> None:
    """Binomial shot-noise record in the trace file format"""
    kind = parse_models(args.model)[0]
    params = ModelParams(args.omega, args.gamma)
    geom = parse_geometry(args)
    times = parse_times(args, params)
    if args.shots < 1:
        raise UsageError(f"--shots must be >= 1, got {args.shots}")
    seed = args.seed if args.seed is not None else get_default_seed()

    record = sample_trace(kind, params, geom, times, args.shots, seed)
    if args.out:
        export_trace(record, args.out, args.format)
    elif output_format(None, args.format) == "json":
        emit(render_report(trace_to_json_dict(record)))
    else:
        emit(trace_to_csv_text(record))


def handle_fit(args) -> None:
    kind = ModelKind.parse(args.model)
    record = import_trace(args.input, args.in_format)
    config = load_config(args)
    report = fit_model(kind, record, fixed_geometry(args, config), config)
    emit(render_report(report), args.out)


def handle_discriminate(args) -> None:
    config = load_config(args)
    if args.candidates:
        candidates = [ModelKind.parse(name) for name in args.candidates.split(",") if name.strip()]
    else:
        candidates = [ModelKind.parse(name) for name in config.candidates]
    record = import_trace(args.input, args.in_format)
    report = discriminate(record, candidates, fixed_geometry(args, config), config)
    emit(render_report(report), args.out)


def handle_identifiability(args) -> None:
    kind = ModelKind.parse(args.model)
    entries = identifiability_report(kind, parse_geometry(args))
    if args.reasons:
        data = {name: {"status": entry.status.value, "reason": entry.reason} for name, entry in entries.items()}
    else:
        data = {name: entry.status.value for name, entry in entries.items()}
    emit(render_report(data), args.out)


def handle_bloch(args) -> None:
    """(t, vx, vy, vz) from the closed form or a numerical propagator"""
    kind = parse_models(args.model)[0]
    params = ModelParams(args.omega, args.gamma)
    theta_I = preparation_angle(args)
    times = parse_times(args, params)

    if args.engine == "analytic":
        path = bloch_path(kind, params, theta_I, times)
    else:
        path = propagate_path(generator_for_model(kind, params), BlochVector.initial_state(theta_I),
                              times, args.engine)
    columns = {"time": times, "vx": path[:, 0], "vy": path[:, 1], "vz": path[:, 2]}
    emit(render_columns(columns, output_format(args.out, args.format)), args.out)


HANDLERS = {
    "trace": handle_trace,
    "sample": handle_sample,
    "fit": handle_fit,
    "discriminate": handle_discriminate,
    "identifiability": handle_identifiability,
    "bloch": handle_bloch,
}
