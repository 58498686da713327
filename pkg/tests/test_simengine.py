import pytest

from swarmnet.models.enums import (
    EndReasonEnum,
    MessageStatusEnum,
    NetworkEnum,
    PolicyEnum,
    RoleEnum,
    SensorEnum,
    TransmissionModeEnum,
)
from swarmnet.schemas.core import FIVE_G, SIX_G, GeoPoint, NetworkProfile
from swarmnet.schemas.simengine import MESSAGE_LOG_COLUMNS, FleetSpec, MissionScenario, SimScenario
from swarmnet.services import simengine_service
from swarmnet.utils.errors import MissionValidationError, ParameterError, UnknownTaskKind
from swarmnet.utils.geometry import covers
from swarmnet.utils.rng import derive_stream


def _conserved(outcome):
    for drone in outcome.drones:
        spent = drone.initial_energy_j - drone.final_energy_j + drone.recharged_j
        assert spent == pytest.approx(drone.ledger.total_j, rel=1e-9, abs=1e-6)


@pytest.fixture
def small_mission(make_mission):
    return make_mission(side=50.0)


@pytest.fixture
def static_scenario():
    return SimScenario(policy=PolicyEnum.static)


def test_inference_delays():
    assert simengine_service.inference_delay("RoadQualityClassify") == 80.0
    assert simengine_service.inference_delay("PotholeDetect") == 115.0
    assert simengine_service.inference_delay("Custom", {"Custom": 42}) == 42.0
    with pytest.raises(UnknownTaskKind):
        simengine_service.inference_delay("Custom")


def test_delivery_delay_grows_with_swarm():
    assert simengine_service.delivery_delay_ms(SIX_G, 10, 50) == pytest.approx(0.6)
    assert simengine_service.delivery_delay_ms(SIX_G, 50, 50) == pytest.approx(1.0)


def test_transmit_first_attempt():
    result = simengine_service.transmit(88.0, SIX_G, derive_stream(1, ["tx"]), n_drones=10)
    assert result.delivered
    assert result.attempts == 1
    assert result.elapsed_ms == pytest.approx(0.6)
    assert result.bits == 88.0


def test_transmit_gives_up_after_retry_cap():
    hopeless = NetworkProfile(name=NetworkEnum.five_g, base_latency_ms=2.0, reliability=1e-12, base_collision_rate=0.0)
    result = simengine_service.transmit(8.0, hopeless, derive_stream(1, ["tx"]), n_drones=1, retry_cap=3)
    assert not result.delivered
    assert result.attempts == 4
    assert result.elapsed_ms == pytest.approx(4 * 10.0 * 2.0)


def test_sample_drops():
    stream = derive_stream(5, ["drops"])
    assert simengine_service.sample_drops(1.0, stream, 1000) == 0
    assert simengine_service.sample_drops(0.5, stream, 0) == 0
    drops = simengine_service.sample_drops(0.9, stream, 10_000)
    # binomial(10000, 0.1): sd = 30
    assert abs(drops - 1000) < 120


@pytest.mark.parametrize("reliability,n_sends", [(0.0, 10), (1.5, 10), (0.9, -1)])
def test_sample_drops_rejects(reliability, n_sends):
    with pytest.raises(ParameterError):
        simengine_service.sample_drops(reliability, derive_stream(5, ["drops"]), n_sends)


def test_fault_process(small_mission):
    faults = simengine_service.fault_process(small_mission, derive_stream(3, ["faults"]), rate_mean=20.0, periods=3)
    period_ms = small_mission.constraints.max_duration_min * 60_000.0
    assert [f.fault_id for f in faults] == list(range(len(faults)))
    assert all(covers(small_mission.perimeter, f.position) for f in faults)
    assert all(0.0 <= f.occurred_ms < 3 * period_ms for f in faults)
    assert faults == simengine_service.fault_process(
        small_mission, derive_stream(3, ["faults"]), rate_mean=20.0, periods=3
    )


def test_fault_process_at_start(small_mission):
    faults = simengine_service.fault_process(small_mission, derive_stream(3, ["faults"]), rate_mean=20.0, at_start=True)
    assert all(f.occurred_ms == 0.0 for f in faults)


def test_single_collector_covers_the_square(small_mission, static_scenario, make_drone):
    outcome = simengine_service.run_mission(small_mission, [make_drone("d0", 100.0)], static_scenario, seed=11)
    assert outcome.end_reason == EndReasonEnum.coverage_complete
    assert outcome.coverage_fraction == pytest.approx(1.0)
    drone = outcome.drones[0]
    assert drone.initial_role == RoleEnum.collector
    # 5 m climb to the first pass, five 50 m passes, four 10 m turns
    assert drone.ledger.cruise_j == pytest.approx(50.0 * 295.0)
    assert drone.captures == 30
    assert 29_500.0 < outcome.operational_time_ms < 30_000.0
    road = [m for m in outcome.messages if m.kind == "RoadQuality"]
    assert len(road) == 30
    assert all(m.size_bytes == 11 for m in road)
    assert 0.0 < outcome.tx_energy_share < 1.0
    _conserved(outcome)


def test_low_battery_collector_depletes(small_mission, static_scenario, make_drone):
    outcome = simengine_service.run_mission(small_mission, [make_drone("d0", 10.0)], static_scenario, seed=11)
    assert outcome.end_reason == EndReasonEnum.swarm_exhausted
    assert outcome.coverage_fraction < 1.0
    drone = outcome.drones[0]
    assert drone.final_energy_j == 0.0
    assert drone.depleted_at_ms == pytest.approx(outcome.operational_time_ms)
    assert any("depleted" in w for w in outcome.warnings)
    _conserved(outcome)


def test_faults_present_at_start_are_all_detected(small_mission, make_drone):
    scenario = SimScenario(policy=PolicyEnum.static, faults_at_start=True, fault_rate_mean=10.0)
    injected = 0
    for seed in range(3):
        outcome = simengine_service.run_mission(
            small_mission, [make_drone("d0", 100.0, capacity_j=10_000_000.0)], scenario, seed
        )
        injected += outcome.faults_injected
        assert outcome.faults_detected == outcome.faults_injected
        for fault in outcome.faults:
            assert fault.detected_by == "d0"
            assert fault.latency_ms >= 80.0
            assert fault.detected_ms == pytest.approx(fault.pass_ms + fault.latency_ms)
    assert injected > 0


def test_repeat_coverage_runs_to_the_cap(make_mission, make_drone):
    mission = make_mission(side=50.0, max_duration_min=1.0)
    scenario = SimScenario(policy=PolicyEnum.static, repeat_coverage=True)
    outcome = simengine_service.run_mission(mission, [make_drone("d0", 100.0, capacity_j=10_000_000.0)], scenario, 2)
    assert outcome.end_reason == EndReasonEnum.duration_cap
    assert outcome.operational_time_ms == 60_000.0
    assert outcome.drones[0].captures > 30
    _conserved(outcome)


def test_heavy_tasks_are_offloaded_to_the_computer(make_mission, make_drone):
    mission = make_mission(side=50.0, sensors=(SensorEnum.rgb, SensorEnum.thermal))
    drones = [make_drone(f"d{i}", 100.0) for i in range(3)]
    outcome = simengine_service.run_mission(mission, drones, SimScenario(), seed=4)
    assert outcome.end_reason == EndReasonEnum.coverage_complete
    computer = next(d for d in outcome.drones if d.initial_role == RoleEnum.computer)
    assert computer.drone_id == "d0"
    assert computer.ledger.hover_j > 0.0
    assert computer.ledger.compute_j > 0.0
    assert any(m.kind == "InspectionFinding" and m.source_drone == "d0" for m in outcome.messages)
    _conserved(outcome)


def test_run_is_deterministic(make_mission, make_drone):
    mission = make_mission(side=50.0, sensors=(SensorEnum.rgb, SensorEnum.thermal))
    drones = [make_drone("d0", 90.0), make_drone("d1", 60.0), make_drone("d2", 25.0)]
    first = simengine_service.run_mission(mission, drones, SimScenario(), seed=9)
    second = simengine_service.run_mission(mission, drones, SimScenario(), seed=9)
    assert first == second


def test_default_patrol_conserves_energy():
    scenario = simengine_service.default_scenario()
    fleet = simengine_service.fleet_for_seed(scenario.fleet, 3)
    outcome = simengine_service.run_mission(scenario.mission, fleet, scenario.simulation, 3)
    assert outcome.operational_time_ms <= 600_000.0
    _conserved(outcome)


def test_message_log(small_mission, static_scenario, make_drone):
    outcome = simengine_service.run_mission(small_mission, [make_drone("d0", 100.0)], static_scenario, seed=1)
    assert all(m.status == MessageStatusEnum.delivered for m in outcome.messages)
    assert list(outcome.messages[0].as_record()) == MESSAGE_LOG_COLUMNS


def test_run_mission_rejects(make_mission, small_mission, static_scenario, make_drone):
    with pytest.raises(MissionValidationError):
        simengine_service.run_mission(make_mission(max_duration_min=0.0), [make_drone("d0", 100.0)], static_scenario, 1)
    with pytest.raises(ParameterError):
        simengine_service.run_mission(small_mission, [], static_scenario, 1)
    with pytest.raises(ParameterError):
        simengine_service.run_mission(small_mission, [make_drone("d0", 100.0)] * 2, static_scenario, 1)


def test_outcome_document_round_trip(small_mission, static_scenario, make_drone):
    outcome = simengine_service.run_mission(small_mission, [make_drone("d0", 100.0)], static_scenario, seed=1)
    text = simengine_service.serialize_outcome(outcome)
    assert text.startswith("schema: swarmnet/outcome")
    assert simengine_service.deserialize_outcome(text) == outcome


@pytest.fixture
def small_scenario(small_mission):
    return MissionScenario(
        mission=small_mission,
        simulation=SimScenario(policy=PolicyEnum.static),
        fleet=FleetSpec(size=1, battery_min_pct=100.0, battery_max_pct=100.0),
    )


def test_raw_frames_cost_more_than_semantic_messages(small_scenario):
    rows = simengine_service.compare_modes(small_scenario, [1, 2])
    assert [r.seed for r in rows] == [1, 2]
    for row in rows:
        assert row.raw_tx_j > row.semantic_tx_j
        assert row.raw_tx_share > row.semantic_tx_share
    assert simengine_service.compare_modes(small_scenario, [1, 2], workers=2) == rows


def test_compare_policies_needs_ten_seeds(small_scenario):
    with pytest.raises(ParameterError):
        simengine_service.compare_policies(small_scenario, list(range(9)))


def test_compare_policies_counts(small_mission):
    scenario = MissionScenario(mission=small_mission, fleet=FleetSpec(size=2))
    comparison = simengine_service.compare_policies(scenario, list(range(10)))
    assert comparison.baseline == PolicyEnum.static
    assert comparison.candidate == PolicyEnum.energy_aware
    assert len(comparison.pairs) == 10
    assert comparison.wins + comparison.losses + comparison.ties == 10
    assert 0.0 <= comparison.p_value <= 1.0
    assert comparison == simengine_service.compare_policies(scenario, list(range(10)), workers=3)


def test_default_scenario_shape():
    scenario = simengine_service.default_scenario()
    assert scenario.simulation.repeat_coverage
    assert len(scenario.simulation.stations) == 1
    assert scenario.simulation.transmission_mode == TransmissionModeEnum.semantic
    assert scenario.fleet.size == 6


@pytest.mark.slow
def test_energy_aware_outlasts_static_on_patrol():
    comparison = simengine_service.compare_policies(simengine_service.default_scenario(), list(range(30)), workers=4)
    assert comparison.mean_delta_ms > 0.0
    assert comparison.p_value < 0.05


def test_zero_sensor_range_detects_nothing(small_mission, make_drone):
    scenario = SimScenario(policy=PolicyEnum.static, faults_at_start=True, fault_rate_mean=10.0, sensor_range_m=0.0)
    injected = 0
    for seed in range(3):
        outcome = simengine_service.run_mission(
            small_mission, [make_drone("d0", 100.0, capacity_j=10_000_000.0)], scenario, seed
        )
        injected += outcome.faults_injected
        assert outcome.faults_detected == 0
        assert not any(m.kind == "FaultReport" for m in outcome.messages)
    assert injected > 0


@pytest.mark.parametrize("policy", list(PolicyEnum))
def test_low_battery_shortens_operational_time(small_mission, make_drone, policy):
    scenario = SimScenario(policy=policy)
    full = simengine_service.run_mission(small_mission, [make_drone("d0", 100.0)], scenario, seed=6)
    low = simengine_service.run_mission(small_mission, [make_drone("d0", 10.0)], scenario, seed=6)
    assert low.operational_time_ms < full.operational_time_ms


def test_identical_policies_have_zero_delta(small_scenario):
    comparison = simengine_service.compare_policies(
        small_scenario, list(range(10)), baseline=PolicyEnum.static, candidate=PolicyEnum.static
    )
    assert all(p.delta_ms == 0.0 for p in comparison.pairs)
    assert comparison.mean_delta_ms == 0.0
    assert comparison.ties == 10
    assert comparison.p_value == 1.0


def test_five_g_drop_rate():
    drops = simengine_service.sample_drops(FIVE_G.reliability, derive_stream(12, ["drops", "5g"]), 1_000_000)
    # binomial(10^6, 10^-5): mean 10, sd 3.2
    assert 0 < drops < 25


def test_six_g_drop_rate():
    drops = simengine_service.sample_drops(SIX_G.reliability, derive_stream(12, ["drops", "6g"]), 1_000_000)
    # expected 0.01 drops
    assert drops <= 2


@pytest.fixture
def recharge_scenario():
    return SimScenario(
        policy=PolicyEnum.static,
        stations=[GeoPoint(x_m=25.0, y_m=25.0)],
        battery_check_interval_s=2.0,
    )


def test_static_collector_without_recharge_runs_flat(small_mission, make_drone, recharge_scenario):
    # 10 kJ cannot pay for the 14.75 kJ sweep
    drone = make_drone("d0", 50.0, capacity_j=20_000.0)
    outcome = simengine_service.run_mission(small_mission, [drone], recharge_scenario, seed=3)
    assert outcome.end_reason == EndReasonEnum.swarm_exhausted
    assert outcome.drones[0].recharged_j == 0.0


def test_static_collector_recharges_and_resumes(small_mission, make_drone, recharge_scenario):
    scenario = recharge_scenario.model_copy(update={"static_recharge": True})
    drone = make_drone("d0", 50.0, capacity_j=20_000.0)
    outcome = simengine_service.run_mission(small_mission, [drone], scenario, seed=3)
    assert outcome.end_reason == EndReasonEnum.coverage_complete
    assert outcome.coverage_fraction == pytest.approx(1.0)
    result = outcome.drones[0]
    assert result.recharged_j > 0.0
    assert result.initial_role == RoleEnum.collector
    assert result.depleted_at_ms is None
    _conserved(outcome)


def test_static_recharge_needs_a_station(small_mission, make_drone):
    scenario = SimScenario(policy=PolicyEnum.static, static_recharge=True, battery_check_interval_s=2.0)
    outcome = simengine_service.run_mission(small_mission, [make_drone("d0", 50.0, capacity_j=20_000.0)], scenario, 3)
    assert outcome.end_reason == EndReasonEnum.swarm_exhausted
