from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

from swarmnet.models.enums import MetricEnum, ModeEnum, NetworkEnum
from swarmnet.schemas.core import NetworkProfile, SwarmConfig


class TrialStats(BaseModel):
    model_config = ConfigDict(frozen=True)

    metric: MetricEnum
    mean: float
    std: float = Field(..., ge=0)
    ci_low: float
    ci_high: float
    n_iterations: int = Field(..., ge=2)

    @model_validator(mode="after")
    def _ci_brackets_mean(self) -> "TrialStats":
        if not self.ci_low <= self.mean <= self.ci_high:
            raise ValueError(f"CI [{self.ci_low}, {self.ci_high}] does not contain mean {self.mean}")
        return self


class PerfScenario(BaseModel):
    model_config = ConfigDict(frozen=True)

    profile: NetworkProfile
    swarm: SwarmConfig
    iterations: int = Field(100, ge=1)
    cr_noise_coeff: float = Field(0.04, ge=0)
    mode: ModeEnum = ModeEnum.table_calibrated


class IterationSample(BaseModel):
    model_config = ConfigDict(frozen=True)

    cr_sample: float
    dt_mean: Optional[float] = None
    n_faults: int = Field(..., ge=0)


class ScenarioResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    scenario: PerfScenario
    master_seed: int
    collision: TrialStats
    detection: Optional[TrialStats] = None
    fault_free_iterations: int = 0
    warnings: List[str] = Field(default_factory=list)


# Column order of the delimited Table 1 output.
TABLE1_COLUMNS = [
    "drones",
    "network",
    "cr_mean",
    "cr_std",
    "cr_ci_low",
    "cr_ci_high",
    "dt_mean",
    "dt_std",
    "dt_ci_low",
    "dt_ci_high",
]


class Table1Row(BaseModel):
    model_config = ConfigDict(frozen=True)

    drones: int
    network: NetworkEnum
    cr_mean: float
    cr_std: float
    cr_ci_low: float
    cr_ci_high: float
    dt_mean: Optional[float] = None
    dt_std: Optional[float] = None
    dt_ci_low: Optional[float] = None
    dt_ci_high: Optional[float] = None

    def as_record(self) -> dict:
        record = self.model_dump(mode="json")
        return {column: record[column] for column in TABLE1_COLUMNS}


class PublishedComparison(BaseModel):
    model_config = ConfigDict(frozen=True)

    drones: int
    network: NetworkEnum
    cr_mean: float
    published_cr_mean: float
    cr_rel_deviation: float
    cr_within_tolerance: bool
    dt_mean: Optional[float]
    published_dt_mean: float
    dt_abs_deviation: Optional[float]
    dt_within_tolerance: bool


class LatencySweepRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    base_latency_ms: float
    drones: int
    expected_dt_ms: float
    dt_mean: Optional[float] = None
    dt_std: Optional[float] = None
    dt_ci_low: Optional[float] = None
    dt_ci_high: Optional[float] = None
