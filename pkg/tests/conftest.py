import pytest

from swarmnet.models.enums import MissionTypeEnum, ObjectiveEnum, OutputEnum, SensorEnum
from swarmnet.schemas.core import GeoPoint, Polygon
from swarmnet.schemas.mission import MissionConstraints, MissionSpec
from swarmnet.schemas.planner import DroneState


@pytest.fixture
def make_square():
    def build(side: float, x0: float = 0.0, y0: float = 0.0) -> Polygon:
        corners = [(x0, y0), (x0 + side, y0), (x0 + side, y0 + side), (x0, y0 + side)]
        return Polygon(vertices=[GeoPoint(x_m=x, y_m=y) for x, y in corners])

    return build


@pytest.fixture
def make_mission(make_square):
    def build(
        side: float = 100.0,
        sensors=(SensorEnum.rgb,),
        mission_type: MissionTypeEnum = MissionTypeEnum.road_inspection,
        objectives=(ObjectiveEnum.fault_detection,),
        max_duration_min: float = 30.0,
        reserve_pct: float = 20.0,
    ) -> MissionSpec:
        return MissionSpec(
            mission_id="mission-test",
            mission_type=mission_type,
            objectives=list(objectives),
            perimeter=make_square(side),
            sensors=frozenset(sensors),
            expected_outputs=[OutputEnum.fault_report],
            constraints=MissionConstraints(max_duration_min=max_duration_min, min_battery_reserve_pct=reserve_pct),
        )

    return build


@pytest.fixture
def road_mission(make_mission):
    return make_mission()


@pytest.fixture
def make_drone():
    def build(drone_id: str, battery_pct: float, capacity_j: float = 100_000.0, x: float = 0.0, y: float = 0.0, **extra):
        return DroneState(
            drone_id=drone_id,
            position=GeoPoint(x_m=x, y_m=y),
            battery_pct=battery_pct,
            battery_capacity_j=capacity_j,
            **extra,
        )

    return build
