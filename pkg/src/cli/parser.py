"""
BlochID - Command-Line Parser
Subcommands, flags and their units
"""

import argparse

UNITS_EPILOG = (
    "Units: omega in rad/time, gamma in 1/time, times in the same time unit, "
    "angles in rad (or degrees with --degrees)."
)


class UsageError(ValueError):
    """Bad command line (unknown flag, missing value, unknown subcommand)"""


class BlochIDArgumentParser(argparse.ArgumentParser):
    """ArgumentParser that raises instead of exiting, so run() owns the exit code"""

    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _add_model(parser, help_text="Model kind: m1z, m1x, m1y, m2 or m3"):
    parser.add_argument("--model", required=True, help=help_text)


def _add_params(parser):
    parser.add_argument("--omega", type=float, required=True, help="Angular frequency omega (rad/time)")
    parser.add_argument("--gamma", type=float, required=True, help="Dephasing rate gamma (1/time, >= 0)")


def _add_geometry(parser, required: bool, measurement: bool = True):
    suffix = "" if required else " (give both angles to fix the geometry)"
    parser.add_argument("--theta-i", dest="theta_i", type=float, required=required,
                        help=f"Preparation angle theta_I (rad){suffix}")
    if measurement:
        parser.add_argument("--theta-m", dest="theta_m", type=float, required=required,
                            help=f"Measurement angle theta_M (rad){suffix}")
    parser.add_argument("--degrees", action="store_true", help="Read angles in degrees")


def _add_grid(parser):
    group = parser.add_argument_group("time grid",
                                      "Default: --points samples of the automatic grid "
                                      "[0, 3 max(1/gamma, 2 pi/max(|omega|, gamma))]")
    group.add_argument("--times", help="Comma-separated delays (time units)")
    group.add_argument("--t-max", dest="t_max", type=float, help="Uniform grid on [0, t_max] (time units)")
    group.add_argument("--points", type=int, default=50, help="Number of grid points (default: 50)")


def _add_output(parser):
    parser.add_argument("--out", help="Output file (default: standard output)")
    parser.add_argument("--format", choices=["csv", "json"],
                        help="Output format (default: from the --out extension, else csv)")


def _add_fit_options(parser):
    parser.add_argument("--in", dest="input", required=True, help="Trace file (.csv or .json)")
    parser.add_argument("--in-format", dest="in_format", choices=["csv", "json"],
                        help="Trace file format (default: from the extension)")
    parser.add_argument("--config", help="JSON discriminator config (starts, bic_margin, tolerances, ...)")


def build_parser() -> BlochIDArgumentParser:
    """Create the top-level parser with one subparser per subcommand"""
    parser = BlochIDArgumentParser(
        prog="blochid",
        description="Dephasing qubit models: traces, shot-noise sampling, fitting and model discrimination.",
        epilog=UNITS_EPILOG,
    )
    commands = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    trace = commands.add_parser("trace", help="Noiseless measurement trace p(t) of one or more models",
                                epilog=UNITS_EPILOG)
    _add_model(trace, "Model kind, or a comma-separated list (one p_<kind> column each)")
    _add_params(trace)
    _add_geometry(trace, required=True)
    _add_grid(trace)
    _add_output(trace)

    sample = commands.add_parser("sample", help="Finite-shot measurement record (binomial shot noise)",
                                 epilog=UNITS_EPILOG)
    _add_model(sample)
    _add_params(sample)
    _add_geometry(sample, required=True)
    _add_grid(sample)
    sample.add_argument("--shots", type=int, required=True, help="Shots per time point (>= 1)")
    sample.add_argument("--seed", type=int, help="RNG seed (default: BLOCHID_SEED or 0)")
    _add_output(sample)

    fit = commands.add_parser("fit", help="Fit one model to a trace (JSON fit report)", epilog=UNITS_EPILOG)
    _add_model(fit)
    _add_fit_options(fit)
    _add_geometry(fit, required=False)
    fit.add_argument("--out", help="Output file (default: standard output)")

    discriminate = commands.add_parser("discriminate", help="Select the model that best explains a trace",
                                       epilog=UNITS_EPILOG)
    discriminate.add_argument("--candidates",
                              help="Comma-separated candidate models, at least two (default: from --config)")
    _add_fit_options(discriminate)
    _add_geometry(discriminate, required=False)
    discriminate.add_argument("--out", help="Output file (default: standard output)")

    identifiability = commands.add_parser("identifiability",
                                          help="Which of omega and gamma a geometry can identify",
                                          epilog=UNITS_EPILOG)
    _add_model(identifiability)
    _add_geometry(identifiability, required=True)
    identifiability.add_argument("--reasons", action="store_true", help="Include the reason for each status")
    identifiability.add_argument("--out", help="Output file (default: standard output)")

    bloch = commands.add_parser("bloch", help="Bloch-vector trajectory (t, vx, vy, vz)", epilog=UNITS_EPILOG)
    _add_model(bloch)
    _add_params(bloch)
    _add_geometry(bloch, required=True, measurement=False)
    _add_grid(bloch)
    bloch.add_argument("--engine", choices=["analytic", "expm", "rk45"], default="analytic",
                       help="Closed form (default), matrix exponential or adaptive RK45")
    _add_output(bloch)

    return parser
