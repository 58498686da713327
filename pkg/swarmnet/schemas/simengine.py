import math
from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from swarmnet.models.enums import (
    EndReasonEnum,
    MessageStatusEnum,
    NetworkEnum,
    PolicyEnum,
    RoleEnum,
    TransmissionModeEnum,
)
from swarmnet.schemas.core import GeoPoint, NetworkProfile, network_profile
from swarmnet.schemas.mission import MissionSpec
from swarmnet.schemas.planner import EnergyModel, PlanOptions
from swarmnet.schemas.semcomm import VideoProfile

DEFAULT_INFERENCE_DELAYS_MS = {"DefectDetect": 100.0, "ThermalScan": 200.0, "LidarMap": 300.0}

# Share of drone energy spent on communication cited as motivation for semantic links.
REFERENCE_COMM_SHARE = 0.85


class SimScenario(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    network: NetworkEnum = NetworkEnum.six_g
    base_latency_ms: Optional[float] = Field(None, gt=0)
    max_swarm: int = Field(50, ge=1)
    policy: PolicyEnum = PolicyEnum.energy_aware
    transmission_mode: TransmissionModeEnum = TransmissionModeEnum.semantic
    energy: EnergyModel = Field(default_factory=EnergyModel)
    plan: PlanOptions = Field(default_factory=PlanOptions)
    sensor_range_m: float = Field(10.0, ge=0)
    battery_check_interval_s: float = Field(10.0, gt=0)
    retransmit_timeout_factor: float = Field(10.0, gt=0)
    retry_cap: int = Field(5, ge=0)
    fault_rate_mean: float = Field(5.0, gt=0)
    faults_at_start: bool = False
    repeat_coverage: bool = False
    # Static drones top up at a station on reaching the reserve and then resume their fixed role.
    static_recharge: bool = False
    stations: List[GeoPoint] = Field(default_factory=list)
    inference_delays_ms: Dict[str, float] = Field(default_factory=lambda: dict(DEFAULT_INFERENCE_DELAYS_MS))
    video: VideoProfile = Field(default_factory=lambda: VideoProfile(name="1080p30", width_px=1920, height_px=1080, fps=30))
    reference_comm_share: float = Field(REFERENCE_COMM_SHARE, ge=0, le=1)

    @property
    def profile(self) -> NetworkProfile:
        return network_profile(self.network, self.base_latency_ms)


class FleetSpec(BaseModel):
    """Parameters of a randomized fleet drawn per seed."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    size: int = Field(6, ge=1)
    battery_min_pct: float = Field(15.0, ge=0, le=100)
    battery_max_pct: float = Field(100.0, ge=0, le=100)
    battery_capacity_j: float = Field(100_000.0, gt=0)
    launch: GeoPoint = Field(default_factory=lambda: GeoPoint(x_m=0.0, y_m=0.0))

    @model_validator(mode="after")
    def _ordered_range(self) -> "FleetSpec":
        if self.battery_min_pct > self.battery_max_pct:
            raise ValueError("battery_min_pct must not exceed battery_max_pct")
        return self


class MissionScenario(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    mission: MissionSpec
    simulation: SimScenario = Field(default_factory=SimScenario)
    fleet: FleetSpec = Field(default_factory=FleetSpec)


class Fault(BaseModel):
    model_config = ConfigDict(frozen=True)

    fault_id: int
    position: GeoPoint
    occurred_ms: float = Field(..., ge=0)


class TransmitResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    delivered: bool
    attempts: int
    elapsed_ms: float
    bits: float


class EnergyLedger(BaseModel):
    model_config = ConfigDict(frozen=True)

    cruise_j: float = 0.0
    hover_j: float = 0.0
    compute_j: float = 0.0
    tx_j: float = 0.0

    @property
    def total_j(self) -> float:
        return math.fsum((self.cruise_j, self.hover_j, self.compute_j, self.tx_j))


class DroneOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    drone_id: str
    initial_energy_j: float
    final_energy_j: float = Field(..., ge=0)
    recharged_j: float = Field(0.0, ge=0)
    ledger: EnergyLedger
    initial_role: RoleEnum
    final_role: RoleEnum
    captures: int = 0
    depleted_at_ms: Optional[float] = None


class FaultRecord(BaseModel):
    model_config = ConfigDict(frozen=True)

    fault_id: int
    position: GeoPoint
    occurred_ms: float
    detected: bool = False
    pass_ms: Optional[float] = None
    detected_ms: Optional[float] = None
    latency_ms: Optional[float] = None
    detected_by: Optional[str] = None

    @model_validator(mode="after")
    def _detection_is_complete(self) -> "FaultRecord":
        if self.detected and None in (self.pass_ms, self.detected_ms, self.latency_ms):
            raise ValueError(f"fault {self.fault_id} is detected without pass/detection times")
        return self


MESSAGE_LOG_COLUMNS = [
    "message_id",
    "kind",
    "source_drone",
    "created_ms",
    "delivered_ms",
    "attempts",
    "hops",
    "size_bytes",
    "status",
]


class MessageLogEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    message_id: str
    kind: str
    source_drone: str
    created_ms: float
    delivered_ms: Optional[float] = None
    attempts: int = 0
    hops: int = 1
    size_bytes: int
    status: MessageStatusEnum

    def as_record(self) -> dict:
        record = self.model_dump(mode="json")
        return {column: record[column] for column in MESSAGE_LOG_COLUMNS}


class SimOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    mission_id: str
    seed: int
    policy: PolicyEnum
    network: NetworkEnum
    transmission_mode: TransmissionModeEnum
    end_reason: EndReasonEnum
    operational_time_ms: float = Field(..., ge=0)
    coverage_fraction: float = Field(..., ge=0, le=1)
    drones: List[DroneOutcome]
    faults: List[FaultRecord]
    messages: List[MessageLogEntry]
    tx_energy_share: float = Field(..., ge=0, le=1)
    reference_comm_share: float = REFERENCE_COMM_SHARE
    events_processed: int = 0
    warnings: List[str] = Field(default_factory=list)

    @property
    def faults_injected(self) -> int:
        return len(self.faults)

    @property
    def faults_detected(self) -> int:
        return sum(1 for f in self.faults if f.detected)

    @property
    def total_energy_j(self) -> float:
        return math.fsum(d.ledger.total_j for d in self.drones)


class PairedOutcome(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    baseline_time_ms: float
    candidate_time_ms: float
    delta_ms: float
    baseline_end: EndReasonEnum
    candidate_end: EndReasonEnum


class PolicyComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    baseline: PolicyEnum
    candidate: PolicyEnum
    pairs: List[PairedOutcome]
    mean_delta_ms: float
    wins: int
    losses: int
    ties: int
    p_value: float = Field(..., ge=0, le=1)


class ModeComparisonRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    semantic_tx_share: float
    raw_tx_share: float
    semantic_tx_j: float
    raw_tx_j: float
