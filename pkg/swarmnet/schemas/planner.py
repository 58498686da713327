from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from swarmnet.models.enums import PolicyEnum, RoleEnum
from swarmnet.schemas.core import GeoPoint


class EnergyModel(BaseModel):
    """Energy coefficients.

    Defaults are placeholders for experimentation, except the compute power
    envelope (7-15 W) of the embedded inference board.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    tx_j_per_bit: float = Field(50e-9, gt=0)
    compute_power_w: float = Field(15.0, ge=7, le=15)
    hover_w: float = Field(100.0, gt=0)
    cruise_j_per_m: float = Field(50.0, gt=0)
    cruise_speed_mps: float = Field(10.0, gt=0)
    charge_power_w: float = Field(1000.0, gt=0)


class Workload(BaseModel):
    model_config = ConfigDict(frozen=True)

    path_length_m: float = 0.0
    compute_time_s: float = 0.0
    bits_tx: float = 0.0
    hover_time_s: float = 0.0


class DroneState(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    drone_id: str
    position: GeoPoint
    battery_pct: float = Field(..., ge=0, le=100)
    battery_capacity_j: float = Field(..., gt=0)
    role: RoleEnum = RoleEnum.idle
    waypoints: List[GeoPoint] = Field(default_factory=list)
    charging_target: Optional[GeoPoint] = None

    @model_validator(mode="after")
    def _charging_needs_target(self) -> "DroneState":
        if self.role == RoleEnum.charging and self.charging_target is None:
            raise ValueError("a Charging drone needs a charging_target")
        return self

    @property
    def available_energy_j(self) -> float:
        return self.battery_pct / 100.0 * self.battery_capacity_j


class SweepLine(BaseModel):
    """One clipped pass of the boustrophedon pattern."""

    model_config = ConfigDict(frozen=True)

    row: int
    y_m: float
    x_start_m: float
    x_end_m: float

    @property
    def length_m(self) -> float:
        return self.x_end_m - self.x_start_m


class Sweep(BaseModel):
    model_config = ConfigDict(frozen=True)

    collector_index: int
    lines: List[SweepLine]
    waypoints: List[GeoPoint]
    path_length_m: float
    empty: bool = False


class PlanOptions(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    spacing_m: float = Field(10.0, gt=0)
    capture_compute_s: float = Field(0.195, ge=0)
    capture_bits: float = Field(1024.0, ge=0)


class Assignment(BaseModel):
    model_config = ConfigDict(frozen=True)

    drone_id: str
    role: RoleEnum
    waypoints: List[GeoPoint] = Field(default_factory=list)
    tasks: List[str] = Field(default_factory=list)
    lines: List[SweepLine] = Field(default_factory=list)
    estimated_energy_j: float = 0.0
    budget_j: float = 0.0
    charging_target: Optional[GeoPoint] = None


class TaskPlan(BaseModel):
    model_config = ConfigDict(frozen=True)

    policy: PolicyEnum
    assignments: Dict[str, Assignment]
    charging_stations: List[GeoPoint] = Field(default_factory=list)
    deferred_lines: List[SweepLine] = Field(default_factory=list)
    coverage_fraction: float = Field(..., ge=0, le=1)
    degraded: bool = False
    warnings: List[str] = Field(default_factory=list)


class Fleet(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    drones: List[DroneState]
    stations: List[GeoPoint] = Field(default_factory=list)


class RerouteResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    drone: DroneState
    station: GeoPoint
    distance_m: float
    energy_needed_j: float
    shortfall: bool
