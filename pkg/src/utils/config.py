"""
Configuration for BlochID
Environment defaults (via .env) and the JSON-backed discriminator configuration
"""

import json
import logging
import os
from pathlib import Path
from typing import List, Optional

from dotenv import load_dotenv
from pydantic import BaseModel, ConfigDict, Field, field_validator

logger = logging.getLogger(__name__)

# Load environment variables once, before anything reads them
load_dotenv()

DEFAULT_SEED = 0


def get_default_seed() -> int:
    """Seed used when the caller does not pass one (BLOCHID_SEED or 0)"""
    raw = os.environ.get("BLOCHID_SEED")
    if raw is None or not raw.strip():
        return DEFAULT_SEED
    try:
        return int(raw)
    except ValueError:
        raise ValueError(f"BLOCHID_SEED must be an integer, got '{raw}'")


def get_log_level() -> str:
    """Logging level name from BLOCHID_LOG_LEVEL (default INFO)"""
    return os.environ.get("BLOCHID_LOG_LEVEL", "INFO").upper()


def get_default_max_workers() -> int:
    """Thread count for independent fits from BLOCHID_MAX_WORKERS (default 1)"""
    raw = os.environ.get("BLOCHID_MAX_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        logger.warning(f"Ignoring non-integer BLOCHID_MAX_WORKERS='{raw}'")
        return 1


class GeometrySpec(BaseModel):
    """Preparation and measurement angles in radians, as written in a config file"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    theta_I: float
    theta_M: float


class DiscriminatorConfig(BaseModel):
    """
    Settings for fitting, profiling and model selection

    Every field has a desk-scale default; a JSON object with the same keys
    overrides them. Unknown keys are rejected so that typos surface early.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    candidates: List[str] = Field(default_factory=list)
    fixed_geometry: Optional[GeometrySpec] = None

    # Multi-start local optimization
    starts: int = Field(default=16, ge=1)
    rss_rtol: float = Field(default=1e-10, gt=0)
    max_evaluations: int = Field(default=2000, ge=10)
    seed: int = 0
    max_workers: int = Field(default_factory=get_default_max_workers, ge=1)

    # Model selection
    bic_margin: float = Field(default=2.0, ge=0)
    tol_deg: float = Field(default=1e-3, gt=0)

    # Profile flags
    compute_profile_flags: bool = True
    profile_points: int = Field(default=9, ge=3)
    tol_flat: float = Field(default=1e-6, gt=0)
    weak_threshold: float = Field(default=3.84, ge=0)

    @field_validator("candidates")
    @classmethod
    def _lowercase_candidates(cls, value: List[str]) -> List[str]:
        return [name.strip().lower() for name in value]

    @classmethod
    def from_json_file(cls, path) -> "DiscriminatorConfig":
        """
        Load a configuration from a JSON file

        Args:
            path: Path to a JSON object with DiscriminatorConfig keys

        Returns:
            Validated configuration
        """
        path = Path(path)
        with path.open("r", encoding="utf-8") as handle:
            data = json.load(handle)
        if not isinstance(data, dict):
            raise ValueError(f"{path}: config must be a JSON object")
        logger.info(f"[CONFIG] Loaded discriminator config from {path}")
        return cls.model_validate(data)
