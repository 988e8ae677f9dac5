"""
Domain types for BlochID
Immutable value objects shared by the analytic model, the oracle and the services
"""

import math
from dataclasses import dataclass
from enum import Enum
from typing import Union

import numpy as np

TWO_PI = 2.0 * math.pi
NORM_TOLERANCE = 1e-12

ArrayLike = Union[float, np.ndarray]


class ModelKind(str, Enum):
    """
    The five Hamiltonian/dephasing structures

    M1z: H and V both along sigma_z
    M1x: H and V both along sigma_x
    M1y: H and V both along sigma_y
    M2:  H along sigma_x, V along sigma_z
    M3:  H along sigma_y, V along sigma_z
    """
    M1Z = "m1z"
    M1X = "m1x"
    M1Y = "m1y"
    M2 = "m2"
    M3 = "m3"

    @classmethod
    def parse(cls, name: str) -> "ModelKind":
        """Parse a model name case-insensitively ('M2', 'm2')"""
        try:
            return cls(name.strip().lower())
        except ValueError:
            valid = ", ".join(kind.value for kind in cls)
            raise ValueError(f"Unknown model '{name}'. Must be one of: {valid}")


class Regime(str, Enum):
    """Damping regime of the sigma_z-dephased, transversely driven models"""
    UNDERDAMPED = "underdamped"
    CRITICAL = "critical"
    OVERDAMPED = "overdamped"


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value}")
    return value


@dataclass(frozen=True)
class ModelParams:
    """Angular frequency omega (rad/time, any sign) and dephasing rate gamma (1/time, >= 0)"""
    omega: float
    gamma: float

    def __post_init__(self):
        object.__setattr__(self, "omega", _require_finite("omega", self.omega))
        object.__setattr__(self, "gamma", _require_finite("gamma", self.gamma))
        if self.gamma < 0:
            raise ValueError(f"gamma must be >= 0, got {self.gamma}")


def reduce_angle(angle: float) -> float:
    """Reduce an angle to [0, 2*pi)"""
    reduced = math.fmod(_require_finite("angle", angle), TWO_PI)
    if reduced < 0:
        reduced += TWO_PI
    # fmod of values just below a multiple of 2*pi can round up to 2*pi
    if reduced >= TWO_PI:
        reduced = 0.0
    return reduced


@dataclass(frozen=True)
class ExperimentGeometry:
    """Preparation angle theta_I and measurement angle theta_M, stored in [0, 2*pi)"""
    theta_I: float
    theta_M: float

    def __post_init__(self):
        object.__setattr__(self, "theta_I", reduce_angle(self.theta_I))
        object.__setattr__(self, "theta_M", reduce_angle(self.theta_M))

    @classmethod
    def from_degrees(cls, theta_I: float, theta_M: float) -> "ExperimentGeometry":
        return cls(math.radians(theta_I), math.radians(theta_M))


@dataclass(frozen=True)
class BlochVector:
    """Coherence vector (vx, vy, vz) with v_a = Tr(rho sigma_a); lives in the unit ball"""
    vx: float
    vy: float
    vz: float

    def __post_init__(self):
        for name in ("vx", "vy", "vz"):
            object.__setattr__(self, name, _require_finite(name, getattr(self, name)))
        if self.norm() > 1.0 + NORM_TOLERANCE:
            raise ValueError(f"Bloch vector norm {self.norm():.15g} exceeds 1")

    @classmethod
    def from_array(cls, values) -> "BlochVector":
        vx, vy, vz = np.asarray(values, dtype=float).reshape(3)
        return cls(float(vx), float(vy), float(vz))

    @classmethod
    def initial_state(cls, theta_I: float) -> "BlochVector":
        """Pure state cos(theta_I/2)|0> + sin(theta_I/2)|1>"""
        return cls(math.sin(theta_I), 0.0, math.cos(theta_I))

    def as_array(self) -> np.ndarray:
        return np.array([self.vx, self.vy, self.vz], dtype=float)

    def norm(self) -> float:
        return math.sqrt(self.vx ** 2 + self.vy ** 2 + self.vz ** 2)


@dataclass(frozen=True)
class EffectiveFrequency:
    """
    Effective frequency of the damped oscillation

    value is sqrt(omega^2 - gamma^2/4) when underdamped, sqrt(gamma^2/4 - omega^2)
    when overdamped and 0 at the critical point.
    """
    regime: Regime
    value: float


@dataclass(frozen=True)
class DampedBasisPair:
    """
    Kernels c(t) and s(t) shared by every closed form

    c(t) = exp(-gamma t/2) cos(w t) and s(t) = exp(-gamma t/2) sin(w t)/w, with
    the hyperbolic and critical continuations. Scalars for scalar t, arrays otherwise.
    """
    c: ArrayLike
    s: ArrayLike
