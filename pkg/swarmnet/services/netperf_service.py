"""Closed-form swarm network model and its Monte Carlo harness.

Collision rate ``CR`` and fault-detection time ``T_d`` follow

    P_c(n) = alpha * (n / n_0) * (1 - R)
    T_d    = L_b * (1 + n / n_max) + eps,   eps ~ Exp(mean=L_b)

``TableCalibrated`` mode drops the ``(1 - R)`` factor and reports ``CR`` in
percent, which is the quantity the published table actually lists; the literal
formula is kept for inspection.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from swarmnet.models.enums import MetricEnum, ModeEnum, NetworkEnum
from swarmnet.schemas.core import NetworkProfile, SwarmConfig, network_profile
from swarmnet.schemas.netperf import (
    IterationSample,
    LatencySweepRow,
    PerfScenario,
    PublishedComparison,
    ScenarioResult,
    Table1Row,
    TrialStats,
)
from swarmnet.utils.errors import ParameterError
from swarmnet.utils.rng import RngStream, derive_stream, sample_exponential, sample_poisson

logger = logging.getLogger(__name__)

REFERENCE_SIZE = 10
MAX_SWARM = 50
FAULT_RATE_MEAN = 5.0
CR_NOISE_COEFF = 0.04
TABLE1_ITERATIONS = 100
TABLE1_DRONE_COUNTS = (10, 20, 30, 40, 50)
TABLE1_NETWORKS = (NetworkEnum.five_g, NetworkEnum.six_g)

CR_TOLERANCE_REL = 0.05
DT_TOLERANCE_MS = 0.15

# (drones, network) -> (cr_mean, cr_std, cr_ci, dt_mean, dt_std, dt_ci)
PUBLISHED_TABLE1: Dict[Tuple[int, NetworkEnum], tuple] = {
    (10, NetworkEnum.five_g): (1.995, 0.052, (1.912, 2.099), 2.12, 0.41, (1.49, 3.05)),
    (10, NetworkEnum.six_g): (0.101, 0.013, (0.077, 0.128), 1.10, 0.23, (0.73, 1.58)),
    (20, NetworkEnum.five_g): (4.003, 0.072, (3.877, 4.133), 2.34, 0.43, (1.58, 3.35)),
    (20, NetworkEnum.six_g): (0.200, 0.020, (0.165, 0.234), 1.21, 0.26, (0.81, 1.78)),
    (30, NetworkEnum.five_g): (6.013, 0.093, (5.820, 6.165), 2.70, 0.60, (1.86, 4.04)),
    (30, NetworkEnum.six_g): (0.303, 0.022, (0.260, 0.343), 1.26, 0.20, (0.92, 1.66)),
    (40, NetworkEnum.five_g): (7.999, 0.100, (7.786, 8.159), 2.77, 0.42, (2.07, 3.63)),
    (40, NetworkEnum.six_g): (0.398, 0.024, (0.356, 0.445), 1.39, 0.26, (1.03, 2.03)),
    (50, NetworkEnum.five_g): (10.011, 0.125, (9.778, 10.256), 2.96, 0.59, (2.14, 3.87)),
    (50, NetworkEnum.six_g): (0.503, 0.028, (0.450, 0.555), 1.54, 0.28, (1.19, 2.22)),
}


def table1_swarm(n_drones: int, fault_rate_mean: float = FAULT_RATE_MEAN) -> SwarmConfig:
    return SwarmConfig(
        n_drones=n_drones,
        reference_size=REFERENCE_SIZE,
        max_swarm=MAX_SWARM,
        fault_rate_mean=fault_rate_mean,
    )


def collision_prob(
    profile: NetworkProfile,
    swarm: SwarmConfig,
    mode: ModeEnum = ModeEnum.table_calibrated,
) -> float:
    """Fraction in literal mode, percent in calibrated mode."""
    load = swarm.n_drones / swarm.reference_size
    if mode == ModeEnum.literal_formula:
        return profile.base_collision_rate * load * (1.0 - profile.reliability)
    rate_pct = 100.0 * profile.base_collision_rate * load
    if rate_pct > 100.0:
        logger.warning(
            "collision rate saturates for %s with n=%d (%.3f%%); clamping to 100%%",
            profile.name.value,
            swarm.n_drones,
            rate_pct,
        )
        return 100.0
    return rate_pct


def detection_floor_ms(profile: NetworkProfile, swarm: SwarmConfig) -> float:
    """Deterministic part of the detection time: base latency times congestion."""
    return profile.base_latency_ms * swarm.congestion_factor


def expected_detection_time(profile: NetworkProfile, swarm: SwarmConfig) -> float:
    return detection_floor_ms(profile, swarm) + profile.base_latency_ms


def sample_detection_time(profile: NetworkProfile, swarm: SwarmConfig, stream: RngStream) -> float:
    return detection_floor_ms(profile, swarm) + sample_exponential(stream, profile.base_latency_ms)


def run_iteration(scenario: PerfScenario, stream: RngStream) -> IterationSample:
    # Draw order is fixed: fault count, one detection time per fault, CR noise.
    profile, swarm = scenario.profile, scenario.swarm
    n_faults = sample_poisson(stream, swarm.fault_rate_mean)
    dt_mean = None
    if n_faults:
        times = [sample_detection_time(profile, swarm, stream) for _ in range(n_faults)]
        dt_mean = math.fsum(times) / n_faults

    if scenario.mode == ModeEnum.literal_formula:
        cr_sample = 100.0 * collision_prob(profile, swarm, ModeEnum.literal_formula)
    else:
        center = collision_prob(profile, swarm, ModeEnum.table_calibrated)
        z = float(stream.normal())
        cr_sample = max(0.0, center + scenario.cr_noise_coeff * math.sqrt(center) * z)
    return IterationSample(cr_sample=cr_sample, dt_mean=dt_mean, n_faults=n_faults)


def summarize(metric: MetricEnum, values: Sequence[float]) -> TrialStats:
    """Mean, sample std and empirical 2.5/97.5 percentile interval.

    Values are sorted first and the mean uses an exactly rounded sum, so the
    result does not depend on the order the samples were produced in.
    """
    if len(values) < 2:
        raise ParameterError(f"need at least 2 samples to summarize {metric.value}, got {len(values)}")
    samples = np.sort(np.asarray(values, dtype=float))
    mean = math.fsum(samples) / len(samples)
    std = float(np.std(samples, ddof=1))
    ci_low, ci_high = (float(v) for v in np.percentile(samples, [2.5, 97.5]))
    return TrialStats(
        metric=metric,
        mean=mean,
        std=std,
        ci_low=min(ci_low, mean),
        ci_high=max(ci_high, mean),
        n_iterations=len(samples),
    )


def run_scenario(scenario: PerfScenario, master_seed: int, workers: int = 1) -> ScenarioResult:
    if scenario.iterations < 2:
        raise ParameterError(f"run_scenario needs at least 2 iterations, got {scenario.iterations}")

    def one(i: int) -> IterationSample:
        return run_iteration(scenario, derive_stream(master_seed, ["iter", i]))

    indices = range(scenario.iterations)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            samples = list(pool.map(one, indices))
    else:
        samples = [one(i) for i in indices]

    warnings = []
    load = scenario.swarm.n_drones / scenario.swarm.reference_size
    if scenario.mode == ModeEnum.table_calibrated and 100.0 * scenario.profile.base_collision_rate * load > 100.0:
        warnings.append("collision rate saturated at 100%")

    collision = summarize(MetricEnum.collision_rate_pct, [s.cr_sample for s in samples])
    dt_values = [s.dt_mean for s in samples if s.dt_mean is not None]
    detection = None
    if len(dt_values) >= 2:
        detection = summarize(MetricEnum.detection_time_ms, dt_values)
    else:
        warnings.append(f"only {len(dt_values)} iteration(s) had faults; detection time statistics absent")
        logger.warning("detection statistics absent: %d faulted iterations", len(dt_values))

    return ScenarioResult(
        scenario=scenario,
        master_seed=master_seed,
        collision=collision,
        detection=detection,
        fault_free_iterations=len(samples) - len(dt_values),
        warnings=warnings,
    )


def _row(drones: int, network: NetworkEnum, result: ScenarioResult) -> Table1Row:
    dt = result.detection
    return Table1Row(
        drones=drones,
        network=network,
        cr_mean=result.collision.mean,
        cr_std=result.collision.std,
        cr_ci_low=result.collision.ci_low,
        cr_ci_high=result.collision.ci_high,
        dt_mean=dt.mean if dt else None,
        dt_std=dt.std if dt else None,
        dt_ci_low=dt.ci_low if dt else None,
        dt_ci_high=dt.ci_high if dt else None,
    )


def table1_report(
    seed: int,
    iterations: int = TABLE1_ITERATIONS,
    fault_rate_mean: float = FAULT_RATE_MEAN,
    cr_noise_coeff: float = CR_NOISE_COEFF,
    mode: ModeEnum = ModeEnum.table_calibrated,
    workers: int = 1,
) -> List[Table1Row]:
    """All ten configurations, ordered by swarm size then 5G before 6G."""
    rows = []
    for drones in TABLE1_DRONE_COUNTS:
        for network in TABLE1_NETWORKS:
            scenario = PerfScenario(
                profile=network_profile(network),
                swarm=table1_swarm(drones, fault_rate_mean),
                iterations=iterations,
                cr_noise_coeff=cr_noise_coeff,
                mode=mode,
            )
            rows.append(_row(drones, network, run_scenario(scenario, seed, workers=workers)))
    logger.info("table1 complete: seed=%d iterations=%d", seed, iterations)
    return rows


def _average(values: Iterable[Optional[float]]) -> Optional[float]:
    present = [v for v in values if v is not None]
    if not present:
        return None
    return math.fsum(present) / len(present)


def seed_averaged_table1(seeds: Sequence[int], iterations: int = TABLE1_ITERATIONS, workers: int = 1) -> List[Table1Row]:
    if not seeds:
        raise ParameterError("seed_averaged_table1 needs at least one seed")
    runs = [table1_report(seed, iterations=iterations, workers=workers) for seed in seeds]
    averaged = []
    for position, first in enumerate(runs[0]):
        column = [run[position] for run in runs]
        averaged.append(
            Table1Row(
                drones=first.drones,
                network=first.network,
                **{
                    name: _average(getattr(row, name) for row in column)
                    for name in (
                        "cr_mean",
                        "cr_std",
                        "cr_ci_low",
                        "cr_ci_high",
                        "dt_mean",
                        "dt_std",
                        "dt_ci_low",
                        "dt_ci_high",
                    )
                },
            )
        )
    return averaged


def published_table1() -> List[Table1Row]:
    rows = []
    for (drones, network), (cr_mean, cr_std, cr_ci, dt_mean, dt_std, dt_ci) in PUBLISHED_TABLE1.items():
        rows.append(
            Table1Row(
                drones=drones,
                network=network,
                cr_mean=cr_mean,
                cr_std=cr_std,
                cr_ci_low=cr_ci[0],
                cr_ci_high=cr_ci[1],
                dt_mean=dt_mean,
                dt_std=dt_std,
                dt_ci_low=dt_ci[0],
                dt_ci_high=dt_ci[1],
            )
        )
    return rows


def compare_with_published(rows: Sequence[Table1Row]) -> List[PublishedComparison]:
    comparisons = []
    for row in rows:
        published = PUBLISHED_TABLE1.get((row.drones, row.network))
        if published is None:
            raise ParameterError(f"no published reference for {row.drones} drones on {row.network.value}")
        cr_ref, _, _, dt_ref, _, _ = published
        cr_dev = (row.cr_mean - cr_ref) / cr_ref
        dt_dev = None if row.dt_mean is None else row.dt_mean - dt_ref
        comparisons.append(
            PublishedComparison(
                drones=row.drones,
                network=row.network,
                cr_mean=row.cr_mean,
                published_cr_mean=cr_ref,
                cr_rel_deviation=cr_dev,
                cr_within_tolerance=abs(cr_dev) <= CR_TOLERANCE_REL,
                dt_mean=row.dt_mean,
                published_dt_mean=dt_ref,
                dt_abs_deviation=dt_dev,
                dt_within_tolerance=dt_dev is not None and abs(dt_dev) <= DT_TOLERANCE_MS,
            )
        )
    return comparisons


def latency_sweep(
    latencies_ms: Sequence[float],
    drone_counts: Sequence[int],
    seed: int,
    iterations: int = TABLE1_ITERATIONS,
    fault_rate_mean: float = FAULT_RATE_MEAN,
    network: NetworkEnum = NetworkEnum.six_g,
) -> List[LatencySweepRow]:
    """Detection-time statistics across candidate base latencies of one generation."""
    rows = []
    for latency in latencies_ms:
        profile = network_profile(network, base_latency_ms=latency)
        for drones in drone_counts:
            swarm = table1_swarm(drones, fault_rate_mean)
            result = run_scenario(PerfScenario(profile=profile, swarm=swarm, iterations=iterations), seed)
            dt = result.detection
            rows.append(
                LatencySweepRow(
                    base_latency_ms=latency,
                    drones=drones,
                    expected_dt_ms=expected_detection_time(profile, swarm),
                    dt_mean=dt.mean if dt else None,
                    dt_std=dt.std if dt else None,
                    dt_ci_low=dt.ci_low if dt else None,
                    dt_ci_high=dt.ci_high if dt else None,
                )
            )
    return rows
