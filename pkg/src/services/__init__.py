"""Services module for BlochID"""
from .discriminator import discriminate, fit_model
from .experiment_sim import (
    MeasurementTrace,
    TraceMeta,
    auto_time_grid,
    noiseless_trace,
    sample_trace,
)
from .identifiability import identifiability_report, profile_scan
from .reports import (
    Degeneracy,
    DiscriminationReport,
    FitReport,
    Identifiability,
    IdentifiabilityEntry,
    ProfilePoint,
    Verdict,
)
from .trace_io import export_trace, import_trace

__all__ = [
    'MeasurementTrace',
    'TraceMeta',
    'auto_time_grid',
    'noiseless_trace',
    'sample_trace',
    'export_trace',
    'import_trace',
    'fit_model',
    'discriminate',
    'identifiability_report',
    'profile_scan',
    'FitReport',
    'DiscriminationReport',
    'Identifiability',
    'IdentifiabilityEntry',
    'ProfilePoint',
    'Verdict',
    'Degeneracy',
]
