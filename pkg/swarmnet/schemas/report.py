from typing import Any, List, Optional

from pydantic import BaseModel, ConfigDict, Field

from swarmnet.models.enums import (
    EndReasonEnum,
    MissionTypeEnum,
    NetworkEnum,
    ObjectiveEnum,
    PolicyEnum,
    RoleEnum,
    SensorEnum,
    TransmissionModeEnum,
)


class MissionSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    mission_id: str
    mission_type: MissionTypeEnum
    objectives: List[ObjectiveEnum]
    sensors: List[SensorEnum]
    perimeter_area_m2: float
    max_duration_min: float
    min_battery_reserve_pct: float


class FaultRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    fault_id: int
    x_m: float
    y_m: float
    fault_type: str
    detection_latency_ms: float
    severity: str = "unassessed"
    detected_by: str


class CoverageSummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    coverage_fraction: float
    operational_time_ms: float
    end_reason: EndReasonEnum
    faults_injected: int
    faults_detected: int
    messages_sent: int
    messages_lost: int


class EnergyRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    drone_id: str
    initial_role: RoleEnum
    final_role: RoleEnum
    consumed_j: float
    recharged_j: float
    final_energy_j: float


class EnergySummary(BaseModel):
    model_config = ConfigDict(frozen=True)

    total_j: float
    cruise_j: float
    hover_j: float
    compute_j: float
    tx_j: float
    tx_share: float
    reference_comm_share: float
    drones: List[EnergyRow] = Field(default_factory=list)


class NetworkTable(BaseModel):
    model_config = ConfigDict(frozen=True)

    title: str
    columns: List[str]
    rows: List[List[Any]]


class Provenance(BaseModel):
    model_config = ConfigDict(frozen=True)

    seed: int
    config_hash: str
    artifact_version: str
    policy: PolicyEnum
    network: NetworkEnum
    transmission_mode: TransmissionModeEnum


class ReportBundle(BaseModel):
    model_config = ConfigDict(frozen=True)

    mission: MissionSummary
    faults: List[FaultRow] = Field(default_factory=list)
    coverage: CoverageSummary
    energy: EnergySummary
    network_tables: List[NetworkTable] = Field(default_factory=list)
    provenance: Provenance
    warnings: List[str] = Field(default_factory=list)
    narrative: Optional[str] = None
