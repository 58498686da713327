import pytest

from swarmnet.models.enums import MetricEnum, ModeEnum, NetworkEnum
from swarmnet.schemas.core import FIVE_G, SIX_G, NetworkProfile
from swarmnet.schemas.netperf import TABLE1_COLUMNS, PerfScenario
from swarmnet.services import netperf_service
from swarmnet.utils.errors import ParameterError


def _by_key(rows):
    return {(row.drones, row.network): row for row in rows}


def test_literal_formula_collision_probability():
    swarm = netperf_service.table1_swarm(10)
    assert netperf_service.collision_prob(FIVE_G, swarm, ModeEnum.literal_formula) == pytest.approx(2e-7, rel=1e-9)


def test_calibrated_collision_rate_is_percent():
    assert netperf_service.collision_prob(FIVE_G, netperf_service.table1_swarm(30)) == pytest.approx(6.0)
    assert netperf_service.collision_prob(SIX_G, netperf_service.table1_swarm(50)) == pytest.approx(0.5)


def test_collision_rate_saturates():
    noisy = NetworkProfile(name=NetworkEnum.five_g, base_latency_ms=1.0, reliability=0.9, base_collision_rate=0.5)
    swarm = netperf_service.table1_swarm(30)
    assert netperf_service.collision_prob(noisy, swarm) == 100.0
    result = netperf_service.run_scenario(PerfScenario(profile=noisy, swarm=swarm, iterations=5), 1)
    assert any("saturated" in w for w in result.warnings)


def test_expected_detection_time():
    assert netperf_service.expected_detection_time(SIX_G, netperf_service.table1_swarm(50)) == pytest.approx(1.5)
    assert netperf_service.expected_detection_time(FIVE_G, netperf_service.table1_swarm(10)) == pytest.approx(2.2)


def test_table1_shape_and_columns():
    rows = netperf_service.table1_report(seed=42, iterations=20)
    assert len(rows) == 10
    assert list(rows[0].as_record()) == TABLE1_COLUMNS
    assert [(r.drones, r.network) for r in rows[:2]] == [(10, NetworkEnum.five_g), (10, NetworkEnum.six_g)]


def test_table1_ordering_properties():
    rows = _by_key(netperf_service.table1_report(seed=7, iterations=100))
    for n in netperf_service.TABLE1_DRONE_COUNTS:
        five, six = rows[(n, NetworkEnum.five_g)], rows[(n, NetworkEnum.six_g)]
        assert six.cr_mean < five.cr_mean
        assert six.dt_mean < five.dt_mean
    for network in netperf_service.TABLE1_NETWORKS:
        means = [rows[(n, network)].cr_mean for n in netperf_service.TABLE1_DRONE_COUNTS]
        assert means == sorted(means) and len(set(means)) == len(means)


def test_two_iterations_still_give_statistics():
    scenario = PerfScenario(profile=FIVE_G, swarm=netperf_service.table1_swarm(10), iterations=2)
    result = netperf_service.run_scenario(scenario, 3)
    assert result.collision.n_iterations == 2
    assert result.collision.std >= 0.0
    assert result.collision.ci_low <= result.collision.mean <= result.collision.ci_high


def test_one_iteration_is_rejected():
    scenario = PerfScenario(profile=FIVE_G, swarm=netperf_service.table1_swarm(10), iterations=1)
    with pytest.raises(ParameterError):
        netperf_service.run_scenario(scenario, 3)


def test_summarize_needs_two_samples():
    with pytest.raises(ParameterError):
        netperf_service.summarize(MetricEnum.collision_rate_pct, [1.0])


def test_detection_absent_without_faults():
    swarm = netperf_service.table1_swarm(10, fault_rate_mean=1e-9)
    result = netperf_service.run_scenario(PerfScenario(profile=SIX_G, swarm=swarm, iterations=4), 1)
    assert result.detection is None
    assert result.fault_free_iterations == 4
    assert result.warnings


def test_literal_mode_is_noiseless():
    scenario = PerfScenario(
        profile=FIVE_G,
        swarm=netperf_service.table1_swarm(10),
        iterations=10,
        mode=ModeEnum.literal_formula,
    )
    result = netperf_service.run_scenario(scenario, 5)
    assert result.collision.std == pytest.approx(0.0, abs=1e-15)
    assert result.collision.mean == pytest.approx(2e-5, rel=1e-9)


def test_results_do_not_depend_on_worker_count():
    scenario = PerfScenario(profile=FIVE_G, swarm=netperf_service.table1_swarm(40), iterations=50)
    assert netperf_service.run_scenario(scenario, 99, workers=1) == netperf_service.run_scenario(scenario, 99, workers=4)


def test_same_seed_same_table():
    assert netperf_service.table1_report(11, iterations=10) == netperf_service.table1_report(11, iterations=10)
    assert netperf_service.table1_report(11, iterations=10) != netperf_service.table1_report(12, iterations=10)


def test_seed_averaged_table_matches_published_values():
    rows = netperf_service.seed_averaged_table1(list(range(20)), iterations=100)
    comparisons = netperf_service.compare_with_published(rows)
    assert len(comparisons) == 10
    for comparison in comparisons:
        assert comparison.cr_within_tolerance, comparison
        assert comparison.dt_within_tolerance, comparison


def test_seed_averaging_needs_seeds():
    with pytest.raises(ParameterError):
        netperf_service.seed_averaged_table1([])


def test_published_table_is_complete():
    rows = netperf_service.published_table1()
    assert len(rows) == 10
    assert _by_key(rows)[(30, NetworkEnum.five_g)].cr_mean == 6.013
    assert _by_key(rows)[(50, NetworkEnum.six_g)].dt_mean == 1.54


def test_latency_sweep_tracks_closed_form():
    rows = netperf_service.latency_sweep([0.1, 1.0], [10, 50], seed=4, iterations=50)
    assert [(r.base_latency_ms, r.drones) for r in rows] == [(0.1, 10), (0.1, 50), (1.0, 10), (1.0, 50)]
    assert rows[0].expected_dt_ms == pytest.approx(0.1 * 1.2 + 0.1)
    assert rows[-1].expected_dt_ms == pytest.approx(3.0)


@pytest.mark.slow
@pytest.mark.parametrize("n", netperf_service.TABLE1_DRONE_COUNTS)
@pytest.mark.parametrize("profile", [FIVE_G, SIX_G])
def test_closed_form_convergence(profile, n):
    swarm = netperf_service.table1_swarm(n)
    result = netperf_service.run_scenario(PerfScenario(profile=profile, swarm=swarm, iterations=100_000), 2024)
    assert result.detection.mean == pytest.approx(netperf_service.expected_detection_time(profile, swarm), rel=0.01)
    assert result.collision.mean == pytest.approx(100.0 * profile.base_collision_rate * n / 10, rel=0.01)
