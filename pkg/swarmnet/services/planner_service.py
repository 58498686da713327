"""Energy-aware role assignment and boustrophedon coverage planning."""
import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

from shapely.geometry import Polygon as ShapelyPolygon

from swarmnet.models.enums import MissionTypeEnum, PolicyEnum, RoleEnum, SensorEnum
from swarmnet.schemas.core import GeoPoint, Polygon
from swarmnet.schemas.mission import MissionSpec
from swarmnet.schemas.planner import (
    Assignment,
    DroneState,
    EnergyModel,
    Fleet,
    PlanOptions,
    RerouteResult,
    Sweep,
    SweepLine,
    TaskPlan,
    Workload,
)
from swarmnet.services import mission_service
from swarmnet.utils.documents import dump_document, load_model, read_document
from swarmnet.utils.errors import MissionValidationError, NoChargingStation, ParameterError
from swarmnet.utils.geometry import check_perimeter, clip_row
from swarmnet.utils.rng import RngStream

logger = logging.getLogger(__name__)

LOW_BATTERY_PCT = 30.0
AT_STATION_TOLERANCE_M = 0.5

LIGHT_TASKS: Dict[MissionTypeEnum, Tuple[str, ...]] = {
    MissionTypeEnum.road_inspection: ("RoadQualityClassify", "PotholeDetect"),
}
DEFAULT_LIGHT_TASKS = ("DefectDetect",)
HEAVY_TASKS: Dict[SensorEnum, str] = {
    SensorEnum.thermal: "ThermalScan",
    SensorEnum.lidar: "LidarMap",
}

# Static baseline: roles by drone index, repeating.
STATIC_ROLE_CYCLE = (RoleEnum.collector, RoleEnum.collector, RoleEnum.computer, RoleEnum.relay)


def task_kinds(spec: MissionSpec) -> Tuple[List[str], List[str]]:
    """(light, heavy) inference kinds the mission needs per captured frame."""
    light = list(LIGHT_TASKS.get(spec.mission_type, DEFAULT_LIGHT_TASKS))
    heavy = [task for sensor, task in HEAVY_TASKS.items() if sensor in spec.sensors]
    return light, heavy


def path_length(waypoints: Sequence[GeoPoint], start: Optional[GeoPoint] = None) -> float:
    points = ([start] if start is not None else []) + list(waypoints)
    return math.fsum(a.distance_to(b) for a, b in zip(points, points[1:]))


def estimate_energy(workload: Workload, model: EnergyModel) -> float:
    for name in ("path_length_m", "compute_time_s", "bits_tx", "hover_time_s"):
        value = getattr(workload, name)
        if value < 0 or not math.isfinite(value):
            raise ParameterError(f"{name} must be a non-negative number, got {value}")
    return (
        model.cruise_j_per_m * workload.path_length_m
        + model.compute_power_w * workload.compute_time_s
        + model.tx_j_per_bit * workload.bits_tx
        + model.hover_w * workload.hover_time_s
    )


def sweep_lines(shape: ShapelyPolygon, spacing_m: float) -> List[SweepLine]:
    """Horizontal passes ``spacing_m`` apart, offset half a spacing from the bottom edge.

    Each pass spans the part of the region within half a spacing of it, so narrow features
    falling between two pass centres are still swept.
    """
    _, miny, _, maxy = shape.bounds
    height = maxy - miny
    rows = max(1, math.ceil(height / spacing_m - 1e-9))
    # The top pass never sits above the last half spacing of the region.
    top_offset = max(height - spacing_m / 2.0, height / 2.0)
    lines = []
    for row in range(rows):
        y = miny + min((row + 0.5) * spacing_m, top_offset)
        for x0, x1 in clip_row(shape, y, spacing_m / 2.0):
            lines.append(SweepLine(row=row, y_m=y, x_start_m=x0, x_end_m=x1))
    return lines


def boustrophedon(lines: Sequence[SweepLine]) -> List[GeoPoint]:
    waypoints = []
    for index, line in enumerate(lines):
        left = GeoPoint(x_m=line.x_start_m, y_m=line.y_m)
        right = GeoPoint(x_m=line.x_end_m, y_m=line.y_m)
        waypoints.extend([left, right] if index % 2 == 0 else [right, left])
    return waypoints


def _partition(count: int, parts: int) -> List[Tuple[int, int]]:
    base, extra = divmod(count, parts)
    bounds, start = [], 0
    for index in range(parts):
        size = base + (1 if index < extra else 0)
        bounds.append((start, start + size))
        start += size
    return bounds


def plan_coverage(perimeter: Polygon, n_collectors: int, spacing_m: float) -> List[Sweep]:
    if n_collectors < 1:
        raise ParameterError(f"n_collectors must be at least 1, got {n_collectors}")
    if not spacing_m > 0:
        raise ParameterError(f"spacing_m must be positive, got {spacing_m}")
    lines = sweep_lines(check_perimeter(perimeter), spacing_m)
    sweeps = []
    for index, (start, stop) in enumerate(_partition(len(lines), n_collectors)):
        chunk = lines[start:stop]
        waypoints = boustrophedon(chunk)
        sweeps.append(
            Sweep(
                collector_index=index,
                lines=chunk,
                waypoints=waypoints,
                path_length_m=path_length(waypoints),
                empty=not chunk,
            )
        )
    surplus = sum(1 for s in sweeps if s.empty)
    if surplus:
        logger.warning("%d of %d collectors received an empty sweep (%d lines)", surplus, n_collectors, len(lines))
    return sweeps


def _sweep_workload(drone: DroneState, lines: Sequence[SweepLine], options: PlanOptions) -> Workload:
    waypoints = boustrophedon(lines)
    if not waypoints:
        return Workload()
    swept = math.fsum(line.length_m for line in lines)
    captures = math.floor(swept / options.spacing_m) + len(lines)
    return Workload(
        path_length_m=path_length(waypoints, start=drone.position),
        compute_time_s=captures * options.capture_compute_s,
        bits_tx=captures * options.capture_bits,
    )


def _budget(drone: DroneState, reserve_pct: float) -> float:
    return max(0.0, drone.available_energy_j - reserve_pct / 100.0 * drone.battery_capacity_j)


def _allocate_lines(
    collectors: Sequence[DroneState],
    lines: Sequence[SweepLine],
    reserve_pct: float,
    options: PlanOptions,
    model: EnergyModel,
) -> Tuple[Dict[str, List[SweepLine]], List[SweepLine]]:
    """Contiguous blocks of lines, sized by each collector's energy share and capped by its budget."""
    budgets = [_budget(d, reserve_pct) for d in collectors]
    total_budget = math.fsum(budgets)
    allocation: Dict[str, List[SweepLine]] = {d.drone_id: [] for d in collectors}
    cursor = 0
    for position, (drone, budget) in enumerate(zip(collectors, budgets)):
        remaining_collectors = len(collectors) - position
        if remaining_collectors == 1 or total_budget <= 0:
            share = len(lines) - cursor
        else:
            share = max(1, round(len(lines) * budget / total_budget))
        taken: List[SweepLine] = []
        while cursor < len(lines) and len(taken) < share:
            candidate = taken + [lines[cursor]]
            if estimate_energy(_sweep_workload(drone, candidate, options), model) > budget:
                break
            taken = candidate
            cursor += 1
        allocation[drone.drone_id] = taken
    return allocation, list(lines[cursor:])


def lines_within_budget(
    drone: DroneState,
    lines: Sequence[SweepLine],
    reserve_pct: float,
    options: PlanOptions,
    model: EnergyModel,
) -> int:
    """Leading lines a drone can sweep above its reserve; never fewer than one when lines remain."""
    budget = _budget(drone, reserve_pct)
    count = 0
    while count < len(lines):
        if estimate_energy(_sweep_workload(drone, lines[: count + 1], options), model) > budget:
            break
        count += 1
    return max(count, 1) if lines else 0


def _hover_estimate(duration_s: float, compute_s: float, model: EnergyModel) -> float:
    return estimate_energy(Workload(hover_time_s=duration_s, compute_time_s=compute_s), model)


def _hover_duty(
    drone: DroneState,
    role: RoleEnum,
    hover_s: float,
    compute_s: float,
    reserve_pct: float,
    stations: Sequence[GeoPoint],
    model: EnergyModel,
) -> Tuple[float, Optional[GeoPoint], Optional[str]]:
    """Estimate for a hovering role, with hover time capped to what the budget affords.

    A capped drone gets the nearest station as its charging target when one exists.
    """
    budget = _budget(drone, reserve_pct)
    estimate = _hover_estimate(hover_s, compute_s, model)
    if estimate <= budget:
        return estimate, None, None
    compute_s = min(compute_s, budget / model.compute_power_w)
    affordable_s = max(0.0, (budget - model.compute_power_w * compute_s) / model.hover_w)
    estimate = min(budget, _hover_estimate(affordable_s, compute_s, model))
    target = None
    if stations:
        target = min(stations, key=lambda s: (drone.position.distance_to(s), s.x_m, s.y_m))
    message = f"{drone.drone_id}: {role.value} hover limited to {affordable_s:.0f} s of {hover_s:.0f} s"
    if target is not None:
        message += f", then recharges at ({target.x_m:g}, {target.y_m:g})"
    return estimate, target, message


def _tasks_for(role: RoleEnum, light: List[str], heavy: List[str], has_computers: bool) -> List[str]:
    if role == RoleEnum.collector:
        return ["Sweep", *light] + ([] if has_computers else heavy)
    if role == RoleEnum.computer:
        return list(heavy)
    if role == RoleEnum.relay:
        return ["RelayForward"]
    if role == RoleEnum.charging:
        return ["Recharge"]
    return []


def assign_roles(
    drones: Sequence[DroneState],
    spec: MissionSpec,
    policy: PolicyEnum,
    stations: Sequence[GeoPoint] = (),
    options: Optional[PlanOptions] = None,
    model: Optional[EnergyModel] = None,
) -> TaskPlan:
    if not drones:
        raise ParameterError("assign_roles needs at least one drone")
    violations = mission_service.validate(spec)
    if violations:
        raise MissionValidationError(violations)
    options = options or PlanOptions()
    model = model or EnergyModel()
    lines = sweep_lines(check_perimeter(spec.perimeter), options.spacing_m)
    if policy == PolicyEnum.static:
        return _static_plan(drones, spec, lines, stations, options, model)
    return _energy_aware_plan(drones, spec, lines, stations, options, model)


def _energy_aware_plan(drones, spec, lines, stations, options, model) -> TaskPlan:
    reserve_pct = spec.constraints.min_battery_reserve_pct
    light, heavy = task_kinds(spec)
    low = [d for d in drones if d.battery_pct < LOW_BATTERY_PCT]
    ranked = sorted(
        (d for d in drones if d.battery_pct >= LOW_BATTERY_PCT),
        key=lambda d: (-d.available_energy_j, d.drone_id),
    )
    warnings: List[str] = []

    if not ranked:
        message = f"DegradedMission: all {len(drones)} drones are below {LOW_BATTERY_PCT:.0f}% battery; relay-only plan"
        logger.warning(message)
        assignments = {
            d.drone_id: Assignment(drone_id=d.drone_id, role=RoleEnum.relay, tasks=["RelayForward"], budget_j=_budget(d, reserve_pct))
            for d in drones
        }
        return TaskPlan(
            policy=PolicyEnum.energy_aware,
            assignments=assignments,
            charging_stations=list(stations),
            deferred_lines=list(lines),
            coverage_fraction=0.0,
            degraded=True,
            warnings=[message],
        )

    n_computers = max(1, len(ranked) // 3) if heavy and len(ranked) >= 2 else 0
    computers, collectors = ranked[:n_computers], ranked[n_computers:]
    allocation, deferred = _allocate_lines(collectors, lines, reserve_pct, options, model)

    sweep_time_s = 0.0
    planned: Dict[str, Assignment] = {}
    for drone in collectors:
        taken = allocation[drone.drone_id]
        workload = _sweep_workload(drone, taken, options)
        sweep_time_s = max(sweep_time_s, workload.path_length_m / model.cruise_speed_mps)
        planned[drone.drone_id] = Assignment(
            drone_id=drone.drone_id,
            role=RoleEnum.collector,
            waypoints=boustrophedon(taken),
            tasks=_tasks_for(RoleEnum.collector, light, heavy, bool(computers)),
            lines=taken,
            estimated_energy_j=estimate_energy(workload, model),
            budget_j=_budget(drone, reserve_pct),
        )

    total_swept = math.fsum(line.length_m for line in lines)
    heavy_compute_s = 0.0
    if computers and total_swept > 0:
        captures = math.floor(total_swept / options.spacing_m) + len(lines)
        heavy_compute_s = captures * options.capture_compute_s / len(computers)
    for drone in computers:
        estimate, target, capped = _hover_duty(
            drone, RoleEnum.computer, sweep_time_s, heavy_compute_s, reserve_pct, stations, model
        )
        if capped:
            warnings.append(capped)
        planned[drone.drone_id] = Assignment(
            drone_id=drone.drone_id,
            role=RoleEnum.computer,
            tasks=_tasks_for(RoleEnum.computer, light, heavy, True),
            estimated_energy_j=estimate,
            budget_j=_budget(drone, reserve_pct),
            charging_target=target,
        )

    for drone in low:
        if stations and drone.battery_pct < reserve_pct:
            rerouted = reroute_to_charging(drone, stations, model)
            if rerouted.shortfall:
                warnings.append(f"EnergyShortfall: {drone.drone_id} cannot reach a charging station")
            planned[drone.drone_id] = Assignment(
                drone_id=drone.drone_id,
                role=RoleEnum.charging,
                waypoints=rerouted.drone.waypoints,
                tasks=["Recharge"],
                estimated_energy_j=rerouted.energy_needed_j,
                budget_j=drone.available_energy_j,
                charging_target=rerouted.station,
            )
        else:
            estimate, target, capped = _hover_duty(
                drone, RoleEnum.relay, sweep_time_s, 0.0, reserve_pct, stations, model
            )
            if capped:
                warnings.append(capped)
            planned[drone.drone_id] = Assignment(
                drone_id=drone.drone_id,
                role=RoleEnum.relay,
                tasks=["RelayForward"],
                estimated_energy_j=estimate,
                budget_j=_budget(drone, reserve_pct),
                charging_target=target,
            )

    if deferred:
        warnings.append(f"{len(deferred)} sweep lines deferred until drones recharge")
    for message in warnings:
        logger.warning(message)
    assignments = {d.drone_id: planned[d.drone_id] for d in drones}
    return TaskPlan(
        policy=PolicyEnum.energy_aware,
        assignments=assignments,
        charging_stations=list(stations),
        deferred_lines=deferred,
        coverage_fraction=_coverage_fraction(lines, deferred),
        warnings=warnings,
    )


def _coverage_fraction(lines: Sequence[SweepLine], deferred: Sequence[SweepLine]) -> float:
    total = math.fsum(line.length_m for line in lines)
    if total <= 0:
        return 0.0
    left = math.fsum(line.length_m for line in deferred)
    return min(1.0, max(0.0, (total - left) / total))


def static_role(index: int, has_heavy: bool) -> RoleEnum:
    role = STATIC_ROLE_CYCLE[index % len(STATIC_ROLE_CYCLE)]
    if role == RoleEnum.computer and not has_heavy:
        return RoleEnum.collector
    return role


def _static_plan(drones, spec, lines, stations, options, model) -> TaskPlan:
    reserve_pct = spec.constraints.min_battery_reserve_pct
    light, heavy = task_kinds(spec)
    roles = [static_role(i, bool(heavy)) for i in range(len(drones))]
    collectors = [d for d, role in zip(drones, roles) if role == RoleEnum.collector]
    has_computers = RoleEnum.computer in roles
    warnings: List[str] = []
    assignments: Dict[str, Assignment] = {}
    chunks = _partition(len(lines), len(collectors))
    chunk_of = {d.drone_id: lines[a:b] for d, (a, b) in zip(collectors, chunks)}
    sweep_time_s = 0.0
    for drone, role in zip(drones, roles):
        taken = list(chunk_of.get(drone.drone_id, []))
        if role == RoleEnum.collector:
            workload = _sweep_workload(drone, taken, options)
            sweep_time_s = max(sweep_time_s, workload.path_length_m / model.cruise_speed_mps)
            estimate = estimate_energy(workload, model)
        else:
            estimate = 0.0
        assignments[drone.drone_id] = Assignment(
            drone_id=drone.drone_id,
            role=role,
            waypoints=boustrophedon(taken),
            tasks=_tasks_for(role, light, heavy, has_computers),
            lines=taken,
            estimated_energy_j=estimate,
            budget_j=_budget(drone, reserve_pct),
        )
    for drone, role in zip(drones, roles):
        if role in (RoleEnum.computer, RoleEnum.relay):
            current = assignments[drone.drone_id]
            assignments[drone.drone_id] = current.model_copy(
                update={"estimated_energy_j": _hover_estimate(sweep_time_s, 0.0, model)}
            )
    for assignment in assignments.values():
        if assignment.estimated_energy_j > assignment.budget_j:
            warnings.append(f"{assignment.drone_id}: static assignment exceeds its energy budget")
    return TaskPlan(
        policy=PolicyEnum.static,
        assignments=assignments,
        charging_stations=list(stations),
        coverage_fraction=1.0 if lines else 0.0,
        warnings=warnings,
    )


def replan_role(
    drone: DroneState,
    policy: PolicyEnum,
    stations: Sequence[GeoPoint],
    reserve_pct: float,
    has_pending_lines: bool = False,
) -> RoleEnum:
    """Role a drone should hold now; the engine calls this at decision events."""
    if policy == PolicyEnum.static or drone.role == RoleEnum.charging:
        return drone.role
    if drone.battery_pct < LOW_BATTERY_PCT:
        if drone.role in (RoleEnum.collector, RoleEnum.computer):
            return RoleEnum.charging if stations else RoleEnum.relay
        if drone.battery_pct < reserve_pct:
            return RoleEnum.charging if stations else RoleEnum.idle
        return drone.role
    if drone.role in (RoleEnum.idle, RoleEnum.relay) and has_pending_lines:
        return RoleEnum.collector
    return drone.role


def reroute_to_charging(drone: DroneState, stations: Sequence[GeoPoint], model: EnergyModel) -> RerouteResult:
    if not stations:
        raise NoChargingStation(f"no charging station available for {drone.drone_id}")
    ranked = sorted(stations, key=lambda s: (drone.position.distance_to(s), s.x_m, s.y_m))
    available = drone.available_energy_j
    reachable = [s for s in ranked if model.cruise_j_per_m * drone.position.distance_to(s) <= available]
    station = reachable[0] if reachable else ranked[0]
    distance = drone.position.distance_to(station)
    shortfall = not reachable
    if shortfall:
        logger.warning(
            "EnergyShortfall: %s has %.1f J but the nearest station is %.1f m away",
            drone.drone_id,
            available,
            distance,
        )
    waypoints = [] if distance <= AT_STATION_TOLERANCE_M else [station]
    updated = drone.model_copy(
        update={"role": RoleEnum.charging, "waypoints": waypoints, "charging_target": station}
    )
    return RerouteResult(
        drone=updated,
        station=station,
        distance_m=distance,
        energy_needed_j=model.cruise_j_per_m * distance,
        shortfall=shortfall,
    )


def random_fleet(
    stream: RngStream,
    size: int,
    battery_min_pct: float,
    battery_max_pct: float,
    capacity_j: float,
    launch: GeoPoint,
) -> List[DroneState]:
    if size < 1:
        raise ParameterError(f"fleet size must be at least 1, got {size}")
    width = max(2, len(str(size - 1)))
    batteries = stream.uniform(battery_min_pct, battery_max_pct, size)
    return [
        DroneState(
            drone_id=f"d{index:0{width}d}",
            position=launch,
            battery_pct=round(float(battery), 3),
            battery_capacity_j=capacity_j,
        )
        for index, battery in enumerate(batteries)
    ]


def serialize_fleet(fleet: Fleet) -> str:
    return dump_document("fleet", fleet.model_dump(mode="json"))


def deserialize_fleet(text: str) -> Fleet:
    return load_model(read_document(text, expected_kind="fleet", max_version=1), Fleet)


def serialize_plan(plan: TaskPlan) -> str:
    return dump_document("plan", plan.model_dump(mode="json"))


def deserialize_plan(text: str) -> TaskPlan:
    return load_model(read_document(text, expected_kind="plan", max_version=1), TaskPlan)
