from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from swarmnet.schemas.core import Polygon
from swarmnet.schemas.mission import MissionSpec
from swarmnet.schemas.simengine import FleetSpec, SimScenario

U64_MAX = (1 << 64) - 1


class ScenarioConfig(BaseModel):
    """Everything one simulate/compare run needs; loaded from a ``scenario`` document."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    seed: Optional[int] = Field(None, ge=0, le=U64_MAX)
    out: Optional[str] = None
    mission: Optional[MissionSpec] = None
    mission_path: Optional[str] = None
    request: Optional[str] = None
    perimeter: Optional[Polygon] = None
    fleet_path: Optional[str] = None
    fleet: FleetSpec = Field(default_factory=FleetSpec)
    simulation: SimScenario = Field(default_factory=SimScenario)
    iterations: int = Field(100, ge=2)
    seeds: int = Field(30, ge=10)
    workers: Optional[int] = Field(None, ge=1)

    @model_validator(mode="after")
    def _one_mission_source(self) -> "ScenarioConfig":
        given = [name for name in ("mission", "mission_path", "request") if getattr(self, name) is not None]
        if len(given) > 1:
            raise ValueError(f"{' and '.join(given)} are mutually exclusive; give one mission source")
        return self


class RunManifest(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    command: str
    seed: int = Field(..., ge=0, le=U64_MAX)
    config_hash: str
    artifact_version: str
    outputs: List[str] = Field(default_factory=list)
