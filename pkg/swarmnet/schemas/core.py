import math
from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from swarmnet.models.enums import NetworkEnum


class NetworkProfile(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: NetworkEnum
    base_latency_ms: float = Field(..., gt=0)
    reliability: float = Field(..., gt=0, lt=1)
    base_collision_rate: float = Field(..., ge=0, lt=1)

    @property
    def loss_probability(self) -> float:
        return 1.0 - self.reliability


FIVE_G = NetworkProfile(
    name=NetworkEnum.five_g,
    base_latency_ms=1.0,
    reliability=0.99999,
    base_collision_rate=0.02,
)

SIX_G = NetworkProfile(
    name=NetworkEnum.six_g,
    base_latency_ms=0.5,
    reliability=0.99999999,
    base_collision_rate=0.001,
)

BUILTIN_PROFILES = {NetworkEnum.five_g: FIVE_G, NetworkEnum.six_g: SIX_G}


def network_profile(name: NetworkEnum, base_latency_ms: Optional[float] = None) -> NetworkProfile:
    """Built-in profile for a generation, optionally with another base latency."""
    profile = BUILTIN_PROFILES[NetworkEnum(name)]
    if base_latency_ms is None:
        return profile
    # re-validate so an override cannot break the latency invariant
    return NetworkProfile.model_validate({**profile.model_dump(), "base_latency_ms": base_latency_ms})


class SwarmConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    n_drones: int = Field(..., ge=1)
    reference_size: int = Field(10, ge=1)
    max_swarm: int = Field(50, ge=1)
    fault_rate_mean: float = Field(5.0, gt=0)
    allow_extrapolation: bool = False

    @model_validator(mode="after")
    def _check_max_swarm(self) -> "SwarmConfig":
        if self.n_drones > self.max_swarm and not self.allow_extrapolation:
            raise ValueError(
                f"n_drones={self.n_drones} exceeds max_swarm={self.max_swarm}; "
                "set allow_extrapolation to model a larger swarm"
            )
        return self

    @property
    def congestion_factor(self) -> float:
        return 1.0 + self.n_drones / self.max_swarm


class GeoPoint(BaseModel):
    """Position in meters in the local planar frame."""

    model_config = ConfigDict(frozen=True)

    x_m: float
    y_m: float

    @model_validator(mode="before")
    @classmethod
    def _from_pair(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            if len(data) != 2:
                raise ValueError(f"a point needs exactly two coordinates, got {len(data)}")
            return {"x_m": data[0], "y_m": data[1]}
        return data

    @model_validator(mode="after")
    def _finite(self) -> "GeoPoint":
        if not (math.isfinite(self.x_m) and math.isfinite(self.y_m)):
            raise ValueError("coordinates must be finite")
        return self

    def distance_to(self, other: "GeoPoint") -> float:
        return math.hypot(self.x_m - other.x_m, self.y_m - other.y_m)

    def as_pair(self) -> List[float]:
        return [self.x_m, self.y_m]


class Polygon(BaseModel):
    """Ordered vertex ring, implicitly closed.

    Construction only checks the shape of the data; geometric validity
    (vertex count, simplicity, area) is reported by ``utils.geometry`` so that
    mission validation can list it as a violation instead of failing early.
    """

    model_config = ConfigDict(frozen=True)

    vertices: List[GeoPoint]

    @model_validator(mode="before")
    @classmethod
    def _from_list(cls, data: Any) -> Any:
        if isinstance(data, (list, tuple)):
            return {"vertices": list(data)}
        return data

    def as_pairs(self) -> List[List[float]]:
        return [v.as_pair() for v in self.vertices]
