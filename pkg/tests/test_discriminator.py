"""
Tests for model fitting and discrimination
Run with pytest, or directly: python tests/test_discriminator.py
"""

import json
import math

import numpy as np
import pytest

from src.physics.types import ExperimentGeometry, ModelKind, ModelParams
from src.services.discriminator import discriminate, fit_model, is_degenerate_geometry
from src.services.experiment_sim import MeasurementTrace, auto_time_grid, noiseless_trace, sample_trace
from src.services.fitting import (
    FitProblem,
    LocalResult,
    binomial_weights,
    dominant_frequency,
    information_criterion,
    select_best,
    starting_points,
)
from src.services.reports import Degeneracy, DiscriminationReport, Identifiability, Verdict
from src.utils.config import DiscriminatorConfig
from src.utils.errors import FitContractError


# ==================== FITTING MACHINERY ====================

def test_binomial_weights_floor():
    record = MeasurementTrace([0.0, 1.0, 2.0], [1.0, 0.0, -0.5], [100, 100, 100])
    weights = binomial_weights(record)
    assert weights[0] == pytest.approx(100 / (1 / 400))
    assert weights[1] == pytest.approx(100 / (1 + 1 / 400))
    assert weights[2] == pytest.approx(100 / (0.75 + 1 / 400))


def test_information_criterion_floor():
    n = 50
    floor = n * math.log(1e-18) + 2 * math.log(n)
    assert information_criterion(0.0, n, 2) == pytest.approx(floor)
    assert information_criterion(1e-40, n, 2) == information_criterion(0.0, n, 2)
    assert information_criterion(n, n, 4) == pytest.approx(4 * math.log(n))


def test_dominant_frequency_finds_oscillation():
    times = np.linspace(0.0, 20.0, 200)
    record = MeasurementTrace(times, np.cos(2.5 * times), 1000, exact=True)
    assert dominant_frequency(record) == pytest.approx(2.5, rel=0.05)


def test_starting_points_are_deterministic(m2_noiseless):
    config = DiscriminatorConfig()
    problem = FitProblem(ModelKind.M2, m2_noiseless, None, config)
    first, second = starting_points(problem), starting_points(problem)
    assert len(first) == config.starts
    for a, b in zip(first, second):
        np.testing.assert_array_equal(a, b)
    assert all(point.size == 4 for point in first)


def test_m1y_free_geometry_uses_single_phase(fig2_geometry, truth_params, auto_times):
    record = noiseless_trace(ModelKind.M1Y, truth_params, fig2_geometry, auto_times)
    problem = FitProblem(ModelKind.M1Y, record, None, DiscriminatorConfig())
    assert problem.free_names == ("omega", "gamma", "phase")


def test_select_best_prefers_converged_then_earliest():
    results = [
        LocalResult(np.zeros(2), 0.5, False, 10, 0),
        LocalResult(np.zeros(2), 1.0, True, 10, 1),
        LocalResult(np.zeros(2), 1.0, True, 10, 2),
    ]
    assert select_best(results).start_index == 1
    assert select_best(results[:1]).start_index == 0


# ==================== FIT MODEL ====================

def test_noiseless_m2_recovery(m2_noiseless, fig1_geometry, fast_config):
    report = fit_model(ModelKind.M2, m2_noiseless, fig1_geometry, fast_config)
    assert report.params_hat.omega == pytest.approx(1.0, rel=1e-6)
    assert report.params_hat.gamma == pytest.approx(0.2, rel=1e-6)
    assert report.converged
    assert report.geom_hat.fixed
    assert report.n_free_params == 2
    assert report.rss < 1e-12
    print("✓ Noiseless M2 recovered to 1e-6")


def test_noiseless_rss_vanishes_at_truth(m2_noiseless):
    for kind in (ModelKind.M2, ModelKind.M1X):
        problem = FitProblem(kind, m2_noiseless, None, DiscriminatorConfig())
        named = {"omega": 1.0, "gamma": 0.2, "theta_I": math.pi / 4, "theta_M": 0.0}
        if kind is ModelKind.M2:
            assert problem.rss(named) <= 1e-18 * len(m2_noiseless)
        else:
            assert problem.rss(named) > 1.0


def test_noiseless_m1z_constant_trace_flags_omega():
    params = ModelParams(1.0, 0.2)
    geom = ExperimentGeometry(0.0, math.pi / 3)
    record = noiseless_trace(ModelKind.M1Z, params, geom, auto_time_grid(params))
    report = fit_model(ModelKind.M1Z, record, geom)
    assert report.profile_flags["omega"] is Identifiability.UNIDENTIFIED


def test_noiseless_m2_transverse_geometry_identifies_gamma_only():
    params = ModelParams(1.0, 0.2)
    geom = ExperimentGeometry(math.pi / 2, math.pi / 2)
    record = noiseless_trace(ModelKind.M2, params, geom, auto_time_grid(params))
    report = fit_model(ModelKind.M2, record, geom)
    assert report.params_hat.gamma == pytest.approx(0.2, rel=1e-6)
    assert report.profile_flags["omega"] is Identifiability.UNIDENTIFIED
    assert report.profile_flags["gamma"] is Identifiability.IDENTIFIED


def test_free_geometry_fit_reports_four_parameters(m2_noiseless, fast_config):
    report = fit_model(ModelKind.M2, m2_noiseless, None, fast_config)
    assert report.n_free_params == 4
    assert not report.geom_hat.fixed
    assert report.params_hat.gamma >= 0
    assert report.params_hat.omega >= 0
    assert 0 <= report.geom_hat.theta_I < 2 * math.pi


def test_even_kinds_report_nonnegative_omega(fig1_geometry, auto_times, fast_config):
    record = noiseless_trace(ModelKind.M1X, ModelParams(-1.0, 0.2), fig1_geometry, auto_times)
    report = fit_model(ModelKind.M1X, record, fig1_geometry, fast_config)
    assert report.params_hat.omega == pytest.approx(1.0, rel=1e-6)


def test_m3_recovers_signed_omega(fig2_geometry, auto_times, fast_config):
    record = noiseless_trace(ModelKind.M3, ModelParams(-1.0, 0.2), fig2_geometry, auto_times)
    report = fit_model(ModelKind.M3, record, fig2_geometry, fast_config)
    assert report.params_hat.omega == pytest.approx(-1.0, rel=1e-6)


def test_too_few_points_is_a_contract_error(fast_config):
    record = MeasurementTrace([0.0, 1.0], [1.0, 0.0], [10, 10])
    with pytest.raises(FitContractError):
        fit_model(ModelKind.M2, record, ExperimentGeometry(0.0, 0.0), fast_config)
    three = MeasurementTrace([0.0, 1.0, 2.0], [1.0, 0.0, 0.2], [10, 10, 10])
    fit_model(ModelKind.M2, three, ExperimentGeometry(0.0, 0.0), fast_config)
    with pytest.raises(FitContractError):
        fit_model(ModelKind.M2, three, None, fast_config)


def test_fit_is_reproducible_with_threads(truth_params, fig1_geometry, auto_times):
    record = sample_trace(ModelKind.M2, truth_params, fig1_geometry, auto_times, 1000, 3)
    serial = fit_model(ModelKind.M2, record, fig1_geometry, DiscriminatorConfig(compute_profile_flags=False))
    threaded = fit_model(ModelKind.M2, record, fig1_geometry,
                         DiscriminatorConfig(compute_profile_flags=False, max_workers=4))
    assert serial == threaded


# ==================== DISCRIMINATE ====================

def test_discriminate_m2_against_m1x(truth_params, fig1_geometry, auto_times, fast_config):
    record = sample_trace(ModelKind.M2, truth_params, fig1_geometry, auto_times, 1000, 7)
    report = discriminate(record, [ModelKind.M1X, ModelKind.M2], fig1_geometry, fast_config)
    assert report.verdict is ModelKind.M2
    assert report.degeneracy is None
    assert [fit.kind for fit in report.fits] == [ModelKind.M1X, ModelKind.M2]
    print("✓ M2 selected over M1x")


def test_discriminate_m1y_against_m3(truth_params, fig2_geometry, auto_times, fast_config):
    record = sample_trace(ModelKind.M1Y, truth_params, fig2_geometry, auto_times, 1000, 7)
    report = discriminate(record, ["m1y", "m3"], fig2_geometry, fast_config)
    assert report.verdict is ModelKind.M1Y


def test_degenerate_geometry_is_inconclusive(auto_times, fast_config):
    record = MeasurementTrace(auto_times, np.zeros_like(auto_times), 1000)
    geom = ExperimentGeometry(0.0, math.pi / 2)
    report = discriminate(record, {ModelKind.M1Z, ModelKind.M2}, geom, fast_config)
    assert report.verdict is Verdict.INCONCLUSIVE
    assert report.degeneracy is Degeneracy.DEGENERATE_GEOMETRY
    print("✓ Zero signal is inconclusive and degenerate")


def test_m1y_phase_is_not_read_as_degenerate_geometry(truth_params, auto_times, fast_config):
    # theta_I - theta_M = pi/2 gives exp(-gamma t) cos(omega t + pi/2): full signal
    record = noiseless_trace(ModelKind.M1Y, truth_params, ExperimentGeometry(math.pi / 2, 0.0), auto_times)
    report = discriminate(record, [ModelKind.M1Y, ModelKind.M3], None, fast_config)
    assert report.verdict is ModelKind.M1Y
    assert abs(math.cos(report.fits[0].geom_hat.theta_I)) < 1e-6
    assert report.degeneracy is None
    print("✓ Fitted M1y phase does not trigger the degeneracy flag")


def test_candidate_order_is_deterministic(m2_noiseless, fig1_geometry, fast_config):
    from_set = discriminate(m2_noiseless, {ModelKind.M2, "m1x"}, fig1_geometry, fast_config)
    assert [fit.kind for fit in from_set.fits] == [ModelKind.M1X, ModelKind.M2]
    from_list = discriminate(m2_noiseless, [ModelKind.M2, ModelKind.M1X], fig1_geometry, fast_config)
    assert [fit.kind for fit in from_list.fits] == [ModelKind.M2, ModelKind.M1X]
    assert from_set.verdict == from_list.verdict


def test_verdict_invariant_under_shot_scaling(truth_params, fig1_geometry, auto_times, fast_config):
    record = sample_trace(ModelKind.M2, truth_params, fig1_geometry, auto_times, 1000, 21)
    base = discriminate(record, [ModelKind.M1X, ModelKind.M2], fig1_geometry, fast_config)
    scaled = discriminate(record.scaled_shots(4), [ModelKind.M1X, ModelKind.M2], fig1_geometry, fast_config)
    assert base.verdict == scaled.verdict


def test_discriminate_needs_two_candidates(m2_noiseless, fast_config):
    with pytest.raises(FitContractError):
        discriminate(m2_noiseless, [ModelKind.M2], config=fast_config)
    with pytest.raises(FitContractError):
        discriminate(m2_noiseless, [ModelKind.M2, "m2"], config=fast_config)


def test_report_serializes_with_stable_names(truth_params, fig1_geometry, auto_times, fast_config):
    record = sample_trace(ModelKind.M2, truth_params, fig1_geometry, auto_times, 1000, 7)
    report = discriminate(record, [ModelKind.M1X, ModelKind.M2], fig1_geometry, fast_config)
    data = json.loads(report.model_dump_json())
    assert data["verdict"] == "m2"
    assert list(data["fits"][0]) == [
        "kind", "params_hat", "geom_hat", "rss", "rss_unweighted", "n_points", "n_free_params",
        "information_criterion", "converged", "starts_converged", "evaluations", "profile_flags",
    ]
    assert DiscriminationReport.model_validate_json(report.model_dump_json()) == report
    assert report.fit_for(ModelKind.M2).kind is ModelKind.M2


def test_degeneracy_condition():
    assert is_degenerate_geometry(0.0, math.pi / 2, 1e-3)
    assert is_degenerate_geometry(math.pi / 2, 0.0, 1e-3)
    assert not is_degenerate_geometry(math.pi / 4, 0.0, 1e-3)
    assert not is_degenerate_geometry(math.pi / 2, math.pi / 2, 1e-3)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-v"]))
