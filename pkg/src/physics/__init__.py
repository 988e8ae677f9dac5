"""
BlochID Physics
Closed-form Bloch dynamics for the five dephasing models and numerical propagator oracles
"""

from .model_core import (
    bloch_path,
    bloch_trajectory,
    damped_kernels,
    effective_frequency,
    phi_x2,
    phi_x3,
    phi_y1,
    phi_y3,
    rotated_frame_trace,
    trace,
)
from .propagator_oracle import (
    BlochGenerator,
    build_generator,
    density_matrix_trace,
    drive_generator,
    generator_for_model,
    numeric_trace,
    propagate,
)
from .types import (
    BlochVector,
    DampedBasisPair,
    EffectiveFrequency,
    ExperimentGeometry,
    ModelKind,
    ModelParams,
    Regime,
)

__all__ = [
    'ModelKind',
    'ModelParams',
    'ExperimentGeometry',
    'BlochVector',
    'EffectiveFrequency',
    'DampedBasisPair',
    'Regime',
    'effective_frequency',
    'damped_kernels',
    'phi_x2',
    'phi_x3',
    'phi_y1',
    'phi_y3',
    'bloch_trajectory',
    'bloch_path',
    'trace',
    'rotated_frame_trace',
    'BlochGenerator',
    'build_generator',
    'generator_for_model',
    'drive_generator',
    'propagate',
    'numeric_trace',
    'density_matrix_trace',
]
