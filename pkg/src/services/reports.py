"""
Report records for BlochID
Serializable results of fits, profile scans, identifiability checks and discrimination
"""

from enum import Enum
from typing import Dict, List, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from ..physics.types import ModelKind


class Identifiability(str, Enum):
    """Whether the data pin down a parameter"""
    IDENTIFIED = "identified"
    UNIDENTIFIED = "unidentified"
    WEAKLY_IDENTIFIED = "weakly_identified"


class Verdict(str, Enum):
    INCONCLUSIVE = "inconclusive"


class Degeneracy(str, Enum):
    DEGENERATE_GEOMETRY = "degenerate_geometry"


class ReportModel(BaseModel):
    model_config = ConfigDict(frozen=True, use_enum_values=False)


class FittedParams(ReportModel):
    omega: float
    gamma: float = Field(ge=0)


class FittedGeometry(ReportModel):
    theta_I: float
    theta_M: float
    fixed: bool


class FitReport(ReportModel):
    """Best local optimum found for one candidate model"""
    kind: ModelKind
    params_hat: FittedParams
    geom_hat: FittedGeometry
    rss: float = Field(ge=0)
    rss_unweighted: float = Field(ge=0)
    n_points: int
    n_free_params: int = Field(ge=2, le=4)
    information_criterion: float
    converged: bool
    starts_converged: int
    evaluations: int
    profile_flags: Dict[str, Identifiability] = Field(default_factory=dict)


class DiscriminationReport(ReportModel):
    """One fit per candidate plus the model-selection verdict"""
    fits: List[FitReport]
    verdict: Union[ModelKind, Verdict]
    degeneracy: Optional[Degeneracy] = None
    bic_margin: float

    def fit_for(self, kind: ModelKind) -> FitReport:
        for fit in self.fits:
            if fit.kind == kind:
                return fit
        raise KeyError(f"No fit for {kind}")


class ProfilePoint(ReportModel):
    value: float
    rss: float


class IdentifiabilityEntry(ReportModel):
    status: Identifiability
    reason: str
