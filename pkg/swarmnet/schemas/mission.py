from typing import Callable, FrozenSet, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_serializer

from swarmnet.models.enums import (
    MissionTypeEnum,
    ObjectiveEnum,
    OutputEnum,
    SensorEnum,
    ViolationCodeEnum,
)
from swarmnet.schemas.core import Polygon


def _ordered_sensors(sensors) -> List[str]:
    order = list(SensorEnum)
    return [s.value for s in sorted(sensors, key=order.index)]


class MissionConstraints(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    max_duration_min: float = 30.0
    min_battery_reserve_pct: float = 20.0


class MissionSpec(BaseModel):
    """Structured inspection mission.

    Range and consistency rules are checked by ``mission_service.validate`` so a
    document with, say, a 120 % reserve can still be loaded and reported on.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    mission_id: str
    mission_type: MissionTypeEnum
    objectives: List[ObjectiveEnum]
    perimeter: Polygon
    sensors: FrozenSet[SensorEnum]
    expected_outputs: List[OutputEnum]
    constraints: MissionConstraints = Field(default_factory=MissionConstraints)

    @field_serializer("sensors")
    def _sensors_in_enum_order(self, sensors: FrozenSet[SensorEnum]) -> List[str]:
        return _ordered_sensors(sensors)


class MissionDefaults(BaseModel):
    """Partial mission used to fill whatever a request does not say."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    mission_id: Optional[str] = None
    objectives: Optional[List[ObjectiveEnum]] = None
    perimeter: Optional[Polygon] = None
    sensors: Optional[FrozenSet[SensorEnum]] = None
    expected_outputs: Optional[List[OutputEnum]] = None
    constraints: Optional[MissionConstraints] = None

    @field_serializer("sensors")
    def _sensors_in_enum_order(self, sensors: Optional[FrozenSet[SensorEnum]]) -> Optional[List[str]]:
        return None if sensors is None else _ordered_sensors(sensors)


class Violation(BaseModel):
    model_config = ConfigDict(frozen=True)

    code: ViolationCodeEnum
    field: str
    message: str


class IntentRule(BaseModel):
    model_config = ConfigDict(frozen=True)

    name: str
    keywords: Tuple[str, ...]
    mission_type: MissionTypeEnum
    objectives: Tuple[ObjectiveEnum, ...]
    sensors: Tuple[SensorEnum, ...]


IntentProvider = Callable[[str, MissionDefaults], Optional[MissionSpec]]
