"""
Shared fixtures for the BlochID test suite
"""

import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "..")))

from src.physics.types import ExperimentGeometry, ModelKind, ModelParams  # noqa: E402
from src.services.experiment_sim import auto_time_grid, noiseless_trace  # noqa: E402
from src.utils.config import DiscriminatorConfig  # noqa: E402

ALL_KINDS = list(ModelKind)
GEOMETRY_GRID = [0.0, math.pi / 4, math.pi / 2]


@pytest.fixture
def truth_params():
    return ModelParams(omega=1.0, gamma=0.2)


@pytest.fixture
def fig1_geometry():
    return ExperimentGeometry(math.pi / 4, 0.0)


@pytest.fixture
def fig2_geometry():
    return ExperimentGeometry(math.pi / 4, math.pi / 2)


@pytest.fixture
def auto_times(truth_params):
    return auto_time_grid(truth_params, 50)


@pytest.fixture
def fast_config():
    """Defaults with profiling switched off, for tests that only look at the fit"""
    return DiscriminatorConfig(compute_profile_flags=False)


@pytest.fixture
def m2_noiseless(truth_params, fig1_geometry, auto_times):
    return noiseless_trace(ModelKind.M2, truth_params, fig1_geometry, auto_times, shots=1000)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
