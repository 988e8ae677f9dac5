"""
Tests for shot-noise simulation and the MeasurementTrace record
Run with pytest, or directly: python tests/test_experiment_sim.py
"""

import math

import numpy as np
import pytest

from src.physics.model_core import trace
from src.physics.types import ExperimentGeometry, ModelKind, ModelParams
from src.services.experiment_sim import (
    RNG_NAME,
    MeasurementTrace,
    TraceMeta,
    auto_time_grid,
    noiseless_trace,
    sample_trace,
)
from src.utils.errors import TraceValidationError


# ==================== SAMPLING ====================

def test_constant_plus_one_trace():
    times = np.linspace(0.0, 5.0, 20)
    for seed in (0, 1, 99):
        record = sample_trace(ModelKind.M1Z, ModelParams(2.0, 0.3), ExperimentGeometry(0.0, 0.0), times, 37, seed)
        assert np.all(record.estimates == 1.0)


def test_constant_minus_one_trace():
    times = np.linspace(0.0, 5.0, 20)
    record = sample_trace(ModelKind.M1Z, ModelParams(2.0, 0.3), ExperimentGeometry(0.0, math.pi), times, 50, 3)
    assert np.all(record.estimates == -1.0)


def test_binomial_moments_at_zero_signal():
    # theta_I = 0, theta_M = pi/2 under M1z gives p = 0 (to roundoff)
    shots = 10000
    means, variances = [], []
    for seed in range(200):
        record = sample_trace(ModelKind.M1Z, ModelParams(1.0, 0.1), ExperimentGeometry(0.0, math.pi / 2),
                              np.linspace(0.0, 1.0, 25), shots, seed)
        means.append(np.mean(record.estimates))
        variances.append(np.var(record.estimates, ddof=1))
    assert abs(np.mean(means)) < 0.01
    assert np.mean(variances) == pytest.approx(1.0 / shots, rel=0.2)
    print("✓ Binomial mean and variance at p = 0")


def test_estimates_concentrate_at_large_shot_counts(truth_params, fig1_geometry):
    shots = 10 ** 6
    times = np.array([0.7])
    expected = trace(ModelKind.M2, truth_params, fig1_geometry, 0.7)
    close = 0
    for seed in range(100):
        record = sample_trace(ModelKind.M2, truth_params, fig1_geometry, times, shots, seed)
        close += abs(record.estimates[0] - expected) < 5 * math.sqrt(1.0 / shots)
    assert close >= 99
    print(f"✓ {close}/100 estimates within 5/sqrt(shots) at 1e6 shots")


def test_sampling_is_deterministic(truth_params, fig1_geometry, auto_times):
    first = sample_trace(ModelKind.M2, truth_params, fig1_geometry, auto_times, 1000, 7)
    second = sample_trace(ModelKind.M2, truth_params, fig1_geometry, auto_times, 1000, 7)
    other = sample_trace(ModelKind.M2, truth_params, fig1_geometry, auto_times, 1000, 8)
    assert first == second
    assert not np.array_equal(first.estimates, other.estimates)


def test_sample_metadata(truth_params, fig1_geometry, auto_times):
    record = sample_trace("m2", truth_params, fig1_geometry, auto_times, 1000, 7)
    assert record.meta.kind is ModelKind.M2
    assert record.meta.seed == 7
    assert record.meta.rng == RNG_NAME
    assert record.meta.omega == 1.0
    assert record.meta.theta_I == pytest.approx(math.pi / 4)
    assert not record.exact


def test_estimates_on_shot_lattice(truth_params, fig2_geometry, auto_times):
    shots = np.arange(1, 51) * 3
    record = sample_trace(ModelKind.M1Y, truth_params, fig2_geometry, auto_times, shots, 11)
    counts = (record.estimates + 1.0) * record.shots / 2.0
    np.testing.assert_allclose(counts, np.round(counts), atol=1e-9)
    assert np.all(np.abs(record.estimates) <= 1.0)


def test_sampled_mean_tracks_model(truth_params, fig1_geometry, auto_times):
    record = sample_trace(ModelKind.M2, truth_params, fig1_geometry, auto_times, 100000, 5)
    expected = trace(ModelKind.M2, truth_params, fig1_geometry, auto_times)
    assert np.max(np.abs(record.estimates - expected)) < 0.02


def test_noiseless_trace_is_exact(truth_params, fig1_geometry, auto_times):
    record = noiseless_trace(ModelKind.M2, truth_params, fig1_geometry, auto_times, shots=1000)
    assert record.exact
    np.testing.assert_array_equal(record.estimates, trace(ModelKind.M2, truth_params, fig1_geometry, auto_times))
    assert np.all(record.shots == 1000)
    assert record.meta.seed is None and record.meta.rng is None


# ==================== MEASUREMENT TRACE INVARIANTS ====================

def test_trace_validation_errors():
    with pytest.raises(TraceValidationError):
        MeasurementTrace([0.0, 1.0], [0.0], [10, 10])
    with pytest.raises(TraceValidationError):
        MeasurementTrace([], [], [])
    with pytest.raises(TraceValidationError):
        MeasurementTrace([0.0, 0.0], [0.0, 0.0], [10, 10])
    with pytest.raises(TraceValidationError):
        MeasurementTrace([1.0, 0.5], [0.0, 0.0], [10, 10])
    with pytest.raises(TraceValidationError):
        MeasurementTrace([-1.0, 0.5], [0.0, 0.0], [10, 10])
    with pytest.raises(TraceValidationError):
        MeasurementTrace([0.0], [1.2], [10])
    with pytest.raises(TraceValidationError):
        MeasurementTrace([0.0], [0.0], [0])
    with pytest.raises(TraceValidationError):
        MeasurementTrace([0.0], [float("nan")], [10])
    with pytest.raises(TraceValidationError):
        MeasurementTrace([0.0], [0.0], [2.5])


def test_off_lattice_estimate_rejected_unless_exact():
    with pytest.raises(TraceValidationError, match="not a multiple"):
        MeasurementTrace([0.0, 1.0], [0.5, 0.33], [10, 10])
    exact = MeasurementTrace([0.0, 1.0], [0.5, 0.33], [10, 10], exact=True)
    assert len(exact) == 2


def test_scalar_shots_broadcast_and_arrays_read_only():
    record = MeasurementTrace([0.0, 1.0, 2.0], [0.2, 0.0, -0.2], 10)
    np.testing.assert_array_equal(record.shots, [10, 10, 10])
    assert record.t_max == 2.0
    with pytest.raises(ValueError):
        record.estimates[0] = 0.5


def test_scaled_shots_keeps_lattice():
    record = MeasurementTrace([0.0, 1.0], [0.2, -0.6], [10, 5])
    scaled = record.scaled_shots(3)
    np.testing.assert_array_equal(scaled.shots, [30, 15])
    np.testing.assert_array_equal(scaled.estimates, record.estimates)
    with pytest.raises(ValueError):
        record.scaled_shots(0)


def test_meta_dict_round_trip():
    meta = TraceMeta(kind=ModelKind.M3, omega=1.5, gamma=0.1, theta_I=0.2, theta_M=0.0, seed=4, rng=RNG_NAME)
    assert TraceMeta.from_dict(meta.to_dict()) == meta
    assert "seed" not in TraceMeta(kind=ModelKind.M2).to_dict()


# ==================== TIME GRID ====================

def test_auto_time_grid():
    grid = auto_time_grid(ModelParams(1.0, 0.2), 50)
    assert grid.size == 50
    assert grid[0] == 0.0
    assert grid[-1] == pytest.approx(3.0 * max(1 / 0.2, 2 * math.pi))

    undamped = auto_time_grid(ModelParams(2.0, 0.0), 10)
    assert undamped[-1] == pytest.approx(3.0 * math.pi)

    fast_decay = auto_time_grid(ModelParams(0.0, 4.0))
    assert fast_decay.size == 50
    assert fast_decay[-1] == pytest.approx(3.0 * max(0.25, 2 * math.pi / 4.0))


def test_auto_time_grid_rejects_degenerate_input():
    with pytest.raises(ValueError):
        auto_time_grid(ModelParams(0.0, 0.0))
    with pytest.raises(ValueError):
        auto_time_grid(ModelParams(1.0, 0.1), 1)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-v"]))
