"""Discrete-event mission simulation.

One run binds a mission, a fleet, a network profile and a role policy.
Collectors fly their sweep lines and capture every ``plan.spacing_m``; each
capture is analysed onboard (light tasks on the collector, heavy tasks offloaded
to a Computer), encoded against the shared knowledge base and sent to the base
station, through a Relay when one is up. In raw mode the frame itself is sent
and analysed at the base.

Energy is charged at the event that spends it and every joule lands in one of
the ledger categories, so ``initial - final + recharged == ledger total``.
"""
import logging
import math
from collections import deque
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Deque, Dict, List, Mapping, NamedTuple, Optional, Sequence, Set

import numpy as np
from scipy.stats import binomtest

from swarmnet.models.enums import (
    EndReasonEnum,
    EventKindEnum,
    MessageStatusEnum,
    MissionTypeEnum,
    ObjectiveEnum,
    OutputEnum,
    PolicyEnum,
    RoleEnum,
    SensorEnum,
    TransmissionModeEnum,
)
from swarmnet.schemas.core import GeoPoint, NetworkProfile, Polygon
from swarmnet.schemas.mission import MissionConstraints, MissionSpec
from swarmnet.schemas.planner import DroneState
from swarmnet.schemas.simengine import (
    DroneOutcome,
    EnergyLedger,
    Fault,
    FaultRecord,
    FleetSpec,
    MessageLogEntry,
    MissionScenario,
    ModeComparisonRow,
    PairedOutcome,
    PolicyComparison,
    SimOutcome,
    SimScenario,
    TransmitResult,
)
from swarmnet.services import mission_service, planner_service, semcomm_service
from swarmnet.utils.documents import dump_document, load_model, read_document
from swarmnet.utils.errors import MissionValidationError, ParameterError, UnknownTaskKind
from swarmnet.utils.event_queue import Event, EventQueue
from swarmnet.utils.geometry import check_perimeter, sample_point
from swarmnet.utils.rng import RngStream, derive_stream, sample_poisson, sample_uniform

logger = logging.getLogger(__name__)

BUILTIN_INFERENCE_DELAYS_MS = {"RoadQualityClassify": 80.0, "PotholeDetect": 115.0}
MIN_COMPARISON_SEEDS = 10
BASE_STATION = "base"

_HOVER_ROLES = (RoleEnum.computer, RoleEnum.relay)
_ASSET_FOR_MISSION = {
    MissionTypeEnum.road_inspection: "road",
    MissionTypeEnum.building_inspection: "building",
    MissionTypeEnum.bridge_inspection: "bridge",
    MissionTypeEnum.power_line_inspection: "power_line",
    MissionTypeEnum.fire_hydrant_inspection: "fire_hydrant",
    MissionTypeEnum.construction_monitoring: "site",
}


def inference_delay(task_kind: str, configured: Optional[Mapping[str, float]] = None) -> float:
    if task_kind in BUILTIN_INFERENCE_DELAYS_MS:
        return BUILTIN_INFERENCE_DELAYS_MS[task_kind]
    if configured and task_kind in configured:
        return float(configured[task_kind])
    raise UnknownTaskKind(f"no inference delay known for task kind '{task_kind}'")


def delivery_delay_ms(profile: NetworkProfile, n_drones: int, max_swarm: int) -> float:
    return profile.base_latency_ms * (1.0 + n_drones / max_swarm)


def transmit(
    bits: float,
    profile: NetworkProfile,
    stream: RngStream,
    n_drones: int,
    max_swarm: int = 50,
    retry_cap: int = 5,
    timeout_factor: float = 10.0,
) -> TransmitResult:
    """One hop with retransmission: each attempt is lost with probability ``1 - reliability``."""
    delay = delivery_delay_ms(profile, n_drones, max_swarm)
    timeout = timeout_factor * profile.base_latency_ms
    loss = profile.loss_probability
    for attempt in range(1, retry_cap + 2):
        if float(stream.unit_interval()) >= loss:
            return TransmitResult(delivered=True, attempts=attempt, elapsed_ms=(attempt - 1) * timeout + delay, bits=bits)
    return TransmitResult(delivered=False, attempts=retry_cap + 1, elapsed_ms=(retry_cap + 1) * timeout, bits=bits)


def sample_drops(reliability: float, stream: RngStream, n_sends: int) -> int:
    """Number of lost packets among ``n_sends`` independent sends."""
    if not 0.0 < reliability <= 1.0:
        raise ParameterError(f"reliability must be within (0, 1], got {reliability}")
    if n_sends < 0:
        raise ParameterError(f"n_sends must be non-negative, got {n_sends}")
    if n_sends == 0:
        return 0
    return int(np.count_nonzero(stream.unit_interval(n_sends) < 1.0 - reliability))


def fault_process(
    spec: MissionSpec,
    stream: RngStream,
    rate_mean: float = 5.0,
    periods: int = 1,
    at_start: bool = False,
) -> List[Fault]:
    """Poisson count per period (one period = the mission duration cap), uniform positions inside the perimeter."""
    period_ms = spec.constraints.max_duration_min * 60_000.0
    faults = []
    for period in range(periods):
        for _ in range(sample_poisson(stream, rate_mean)):
            position = sample_point(spec.perimeter, stream)
            offset = 0.0 if at_start else sample_uniform(stream, 0.0, period_ms)
            faults.append(Fault(fault_id=len(faults), position=position, occurred_ms=period * period_ms + offset))
    return faults


class _Step(NamedTuple):
    point: GeoPoint
    line: int
    last: bool


@dataclass
class _Drone:
    drone_id: str
    capacity_j: float
    energy_j: float
    position: GeoPoint
    role: RoleEnum
    stream: RngStream
    initial_energy_j: float = 0.0
    initial_role: RoleEnum = RoleEnum.idle
    ledger: Dict[str, float] = field(default_factory=lambda: {"cruise": 0.0, "hover": 0.0, "compute": 0.0, "tx": 0.0})
    route: Deque[_Step] = field(default_factory=deque)
    current_lines: List[int] = field(default_factory=list)
    own_lines: List[int] = field(default_factory=list)
    epoch: int = 0
    hover_since_ms: float = 0.0
    recharged_j: float = 0.0
    captures: int = 0
    depleted_at_ms: Optional[float] = None
    station: Optional[GeoPoint] = None
    resume_role: Optional[RoleEnum] = None

    @property
    def depleted(self) -> bool:
        return self.depleted_at_ms is not None

    @property
    def battery_pct(self) -> float:
        return min(100.0, max(0.0, 100.0 * self.energy_j / self.capacity_j))

    def state(self, role: Optional[RoleEnum] = None) -> DroneState:
        role = role or self.role
        return DroneState(
            drone_id=self.drone_id,
            position=self.position,
            battery_pct=self.battery_pct,
            battery_capacity_j=self.capacity_j,
            role=role,
            waypoints=[step.point for step in self.route],
            charging_target=self.station if role == RoleEnum.charging else None,
        )


@dataclass
class _Message:
    message_id: str
    kind: str
    source: str
    created_ms: float
    size_bytes: int
    route: List[str]
    faults: List[int]
    pass_ms: float
    attempts: int = 0
    hops: int = 0
    delivered_ms: Optional[float] = None
    status: MessageStatusEnum = MessageStatusEnum.in_flight
    pending_detections: int = 0


class _MissionRun:
    def __init__(self, spec: MissionSpec, drones: Sequence[DroneState], scenario: SimScenario, seed: int):
        self.spec = spec
        self.scenario = scenario
        self.seed = seed
        self.model = scenario.energy
        self.profile = scenario.profile
        self.reserve_pct = spec.constraints.min_battery_reserve_pct
        self.cap_ms = spec.constraints.max_duration_min * 60_000.0
        self.queue = EventQueue()
        self.kb = semcomm_service.default_knowledge_base()
        self.semantic = scenario.transmission_mode == TransmissionModeEnum.semantic

        light, heavy = planner_service.task_kinds(spec)
        self.light_delay_ms = math.fsum(inference_delay(k, scenario.inference_delays_ms) for k in light)
        self.heavy_delay_ms = math.fsum(inference_delay(k, scenario.inference_delays_ms) for k in heavy)
        self.has_heavy = bool(heavy)
        video = scenario.video
        self.frame_bytes = math.ceil(video.width_px * video.height_px * video.bits_per_pixel * video.compression_factor / 8)

        self.lines = planner_service.sweep_lines(check_perimeter(spec.perimeter), scenario.plan.spacing_m)
        self.line_ids = {line: index for index, line in enumerate(self.lines)}
        self.swept: Set[int] = set()
        self.pending: Deque[int] = deque()

        self.faults = fault_process(
            spec, derive_stream(seed, ["faults"]), scenario.fault_rate_mean, at_start=scenario.faults_at_start
        )
        self.occurred: Set[int] = set()
        self.reported: Set[int] = set()
        self.detections: Dict[int, tuple] = {}

        self.messages: Dict[str, _Message] = {}
        self.in_flight = 0
        # captures still on their way through inference and encoding
        self.processing = 0
        self.offloads = 0
        self.warnings: List[str] = []
        self.ending = False
        self.end_reason: Optional[EndReasonEnum] = None

        self.drones: Dict[str, _Drone] = {}
        for state in drones:
            self.drones[state.drone_id] = _Drone(
                drone_id=state.drone_id,
                capacity_j=state.battery_capacity_j,
                energy_j=state.available_energy_j,
                position=state.position,
                role=state.role,
                stream=derive_stream(seed, ["net", state.drone_id]),
                initial_energy_j=state.available_energy_j,
            )
        self.handlers = {
            EventKindEnum.fault_occur: self._on_fault_occur,
            EventKindEnum.battery_check: self._on_battery_check,
            EventKindEnum.replan: self._on_replan,
            EventKindEnum.arrive_waypoint: self._on_arrive,
            EventKindEnum.sensor_capture: self._on_capture,
            EventKindEnum.inference: self._on_inference,
            EventKindEnum.encode: self._on_encode,
            EventKindEnum.transmit: self._on_transmit,
            EventKindEnum.deliver: self._on_deliver,
            EventKindEnum.fault_detect: self._on_fault_detect,
            EventKindEnum.start_charging: self._on_start_charging,
            EventKindEnum.charge_complete: self._on_charge_complete,
        }

    # setup and main loop

    def _initial_plan(self, states: Sequence[DroneState]) -> None:
        plan = planner_service.assign_roles(
            states,
            self.spec,
            self.scenario.policy,
            stations=self.scenario.stations,
            options=self.scenario.plan,
            model=self.model,
        )
        self.warnings.extend(plan.warnings)
        self.pending.extend(self.line_ids[line] for line in plan.deferred_lines)
        for drone_id, assignment in plan.assignments.items():
            drone = self.drones[drone_id]
            drone.role = drone.initial_role = assignment.role
            drone.own_lines = [self.line_ids[line] for line in assignment.lines]
            drone.station = assignment.charging_target

    def run(self, states: Sequence[DroneState]) -> SimOutcome:
        self._initial_plan(states)
        interval_ms = self.scenario.battery_check_interval_s * 1000.0
        self.queue.schedule(self.cap_ms, EventKindEnum.mission_end, BASE_STATION, reason=EndReasonEnum.duration_cap)
        for fault in self.faults:
            if fault.occurred_ms < self.cap_ms:
                self.queue.schedule(fault.occurred_ms, EventKindEnum.fault_occur, f"fault-{fault.fault_id:04d}", fault_id=fault.fault_id)
        for drone in self.drones.values():
            self.queue.schedule(interval_ms, EventKindEnum.battery_check, drone.drone_id)
            if drone.role == RoleEnum.collector:
                self._start_route(drone, drone.own_lines, 0.0)
            elif drone.role == RoleEnum.charging:
                self._fly_to_station(drone, 0.0)
        self._check_progress(0.0)

        while True:
            event = self.queue.pop()
            if event is None:
                raise ParameterError("event queue drained before the mission ended")
            if event.kind == EventKindEnum.mission_end:
                self.end_reason = event.data["reason"]
                break
            self.handlers[event.kind](event)
        return self._outcome(self.queue.now_ms)

    # energy

    def _spend(self, drone: _Drone, category: str, joules: float, t: float) -> bool:
        if drone.depleted:
            return False
        amount = min(joules, drone.energy_j)
        drone.energy_j -= amount
        drone.ledger[category] += amount
        if joules > 0 and drone.energy_j <= 0.0:
            self._deplete(drone, t)
            return False
        return True

    def _settle(self, drone: _Drone, t: float) -> None:
        if drone.role in _HOVER_ROLES and not drone.depleted and t > drone.hover_since_ms:
            self._spend(drone, "hover", self.model.hover_w * (t - drone.hover_since_ms) / 1000.0, t)
        drone.hover_since_ms = t

    def _deplete(self, drone: _Drone, t: float) -> None:
        drone.energy_j = 0.0
        drone.depleted_at_ms = t
        drone.epoch += 1
        if self.scenario.policy == PolicyEnum.energy_aware:
            self._release_lines(drone)
        drone.route.clear()
        drone.current_lines = []
        drone.role = RoleEnum.idle
        message = f"{drone.drone_id} depleted its battery at {t:.0f} ms"
        self.warnings.append(message)
        logger.info(message)
        self._check_progress(t)

    # movement and roles

    def _start_route(self, drone: _Drone, line_ids: Sequence[int], t: float) -> None:
        drone.current_lines = list(line_ids)
        drone.route.clear()
        here = drone.position
        spacing = self.scenario.plan.spacing_m
        for index in line_ids:
            line = self.lines[index]
            steps = max(1, math.ceil(line.length_m / spacing - 1e-9))
            xs = [line.x_start_m + k * line.length_m / steps for k in range(steps + 1)]
            left = GeoPoint(x_m=xs[0], y_m=line.y_m)
            right = GeoPoint(x_m=xs[-1], y_m=line.y_m)
            if here.distance_to(right) < here.distance_to(left):
                xs.reverse()
            for position, x in enumerate(xs):
                drone.route.append(_Step(GeoPoint(x_m=x, y_m=line.y_m), index, position == len(xs) - 1))
            here = drone.route[-1].point
        self._depart(drone, t)

    def _depart(self, drone: _Drone, t: float) -> None:
        if not drone.route:
            self.queue.schedule(t, EventKindEnum.replan, drone.drone_id)
            return
        distance = drone.position.distance_to(drone.route[0].point)
        arrival = t + 1000.0 * distance / self.model.cruise_speed_mps
        self.queue.schedule(arrival, EventKindEnum.arrive_waypoint, drone.drone_id, epoch=drone.epoch, distance=distance)

    def _release_lines(self, drone: _Drone) -> None:
        for index in reversed(drone.current_lines):
            if index not in self.pending:
                self.pending.appendleft(index)
        drone.current_lines = []

    def _assign_lines(self, drone: _Drone, t: float) -> None:
        if not self.pending and self.scenario.repeat_coverage:
            held = {i for d in self.drones.values() for i in d.current_lines}
            self.pending.extend(i for i in range(len(self.lines)) if i not in held)
        if not self.pending:
            drone.role = RoleEnum.idle
            return
        candidates = [self.lines[i] for i in self.pending]
        count = planner_service.lines_within_budget(
            drone.state(), candidates, self.reserve_pct, self.scenario.plan, self.model
        )
        taken = [self.pending.popleft() for _ in range(count)]
        self._start_route(drone, taken, t)

    def _change_role(self, drone: _Drone, role: RoleEnum, t: float) -> None:
        self._release_lines(drone)
        drone.route.clear()
        drone.epoch += 1
        logger.debug("%s: %s -> %s at %.0f ms", drone.drone_id, drone.role.value, role.value, t)
        drone.role = role
        drone.hover_since_ms = t
        if role == RoleEnum.charging:
            self._fly_to_station(drone, t)
        elif role == RoleEnum.collector:
            self._assign_lines(drone, t)

    def _fly_to_station(self, drone: _Drone, t: float) -> None:
        rerouted = planner_service.reroute_to_charging(drone.state(RoleEnum.idle), self.scenario.stations, self.model)
        if rerouted.shortfall:
            self.warnings.append(f"EnergyShortfall: {drone.drone_id} cannot reach a charging station")
        drone.station = rerouted.station
        arrival = t + 1000.0 * rerouted.distance_m / self.model.cruise_speed_mps
        self.queue.schedule(
            arrival, EventKindEnum.start_charging, drone.drone_id, epoch=drone.epoch, distance=rerouted.distance_m
        )

    def _pick_computer(self) -> Optional[_Drone]:
        computers = [d for d in self.drones.values() if d.role == RoleEnum.computer and not d.depleted]
        if not computers:
            return None
        self.offloads += 1
        return computers[self.offloads % len(computers)]

    def _pick_relay(self, sender: _Drone) -> Optional[_Drone]:
        for drone in self.drones.values():
            if drone.role == RoleEnum.relay and not drone.depleted and drone is not sender:
                return drone
        return None

    # progress and termination

    def _could_sweep(self, drone: _Drone) -> bool:
        if drone.depleted:
            return False
        if drone.resume_role is not None:
            return drone.resume_role == RoleEnum.collector
        if drone.role in (RoleEnum.collector, RoleEnum.charging):
            return True
        if self.scenario.policy == PolicyEnum.energy_aware:
            return bool(self.scenario.stations) or drone.battery_pct >= planner_service.LOW_BATTERY_PCT
        return False

    def _check_progress(self, t: float) -> None:
        if self.ending:
            return
        if not self.scenario.repeat_coverage and len(self.swept) == len(self.lines):
            idle = self.in_flight == 0 and self.processing == 0
            if idle and not any(d.route for d in self.drones.values()):
                self._end(t, EndReasonEnum.coverage_complete)
            return
        if not any(self._could_sweep(d) for d in self.drones.values()):
            self._end(t, EndReasonEnum.swarm_exhausted)

    def _end(self, t: float, reason: EndReasonEnum) -> None:
        self.ending = True
        self.queue.schedule(t, EventKindEnum.mission_end, BASE_STATION, reason=reason)

    # handlers

    def _on_fault_occur(self, event: Event) -> None:
        self.occurred.add(event.data["fault_id"])

    def _on_battery_check(self, event: Event) -> None:
        drone = self.drones[event.subject]
        if drone.depleted:
            return
        self._settle(drone, event.time_ms)
        if drone.depleted:
            return
        if self.scenario.policy == PolicyEnum.energy_aware or self._static_recharges():
            self.queue.schedule(event.time_ms, EventKindEnum.replan, drone.drone_id)
        interval_ms = self.scenario.battery_check_interval_s * 1000.0
        self.queue.schedule(event.time_ms + interval_ms, EventKindEnum.battery_check, drone.drone_id)

    def _on_replan(self, event: Event) -> None:
        drone, t = self.drones[event.subject], event.time_ms
        if drone.depleted:
            return
        self._settle(drone, t)
        if drone.depleted:
            return
        if self.scenario.policy == PolicyEnum.static:
            self._static_replan(drone, t)
            self._check_progress(t)
            return

        has_pending = bool(self.pending) or self.scenario.repeat_coverage
        role = planner_service.replan_role(
            drone.state(), PolicyEnum.energy_aware, self.scenario.stations, self.reserve_pct, has_pending
        )
        if role != drone.role:
            self._change_role(drone, role, t)
        elif role == RoleEnum.collector and not drone.route:
            self._assign_lines(drone, t)
        self._check_progress(t)

    def _static_recharges(self) -> bool:
        return self.scenario.static_recharge and bool(self.scenario.stations)

    def _static_replan(self, drone: _Drone, t: float) -> None:
        """Static roles never change; with ``static_recharge`` a drone at its reserve tops up first."""
        if drone.role == RoleEnum.charging:
            return
        if drone.role == RoleEnum.idle and drone.resume_role is not None:
            drone.role, drone.resume_role = drone.resume_role, None
            drone.hover_since_ms = t
            if drone.role == RoleEnum.collector:
                lines = drone.current_lines or (drone.own_lines if self.scenario.repeat_coverage else [])
                if lines:
                    self._start_route(drone, lines, t)
                else:
                    drone.role = RoleEnum.idle
            return
        if self._static_recharges() and drone.role != RoleEnum.idle and drone.battery_pct <= self.reserve_pct:
            logger.debug("%s: %s recharges at %.0f ms", drone.drone_id, drone.role.value, t)
            drone.resume_role = drone.role
            drone.route.clear()
            drone.epoch += 1
            drone.role = RoleEnum.charging
            drone.hover_since_ms = t
            self._fly_to_station(drone, t)
            return
        if drone.role == RoleEnum.collector and not drone.route:
            if self.scenario.repeat_coverage and drone.own_lines:
                self._start_route(drone, drone.own_lines, t)
            else:
                drone.role = RoleEnum.idle

    def _on_arrive(self, event: Event) -> None:
        drone, t = self.drones[event.subject], event.time_ms
        if drone.depleted or event.data["epoch"] != drone.epoch:
            return
        if not self._spend(drone, "cruise", self.model.cruise_j_per_m * event.data["distance"], t):
            return
        step = drone.route.popleft()
        drone.position = step.point
        self.processing += 1
        self.queue.schedule(t, EventKindEnum.sensor_capture, drone.drone_id)
        if step.last:
            self.swept.add(step.line)
            drone.current_lines.remove(step.line)
        self._depart(drone, t)

    def _on_capture(self, event: Event) -> None:
        drone, t = self.drones[event.subject], event.time_ms
        if drone.depleted:
            self._job_done(t)
            return
        drone.captures += 1
        seen = self._faults_in_range(drone.position)
        self.reported.update(seen)
        if not self.semantic:
            self._send(drone, "RawFrame", self.frame_bytes, seen, t, t)
            self._job_done(t)
            return
        computer = self._pick_computer() if self.has_heavy else None
        if computer is not None:
            self.processing += 1
        local_ms = self.light_delay_ms + (self.heavy_delay_ms if computer is None else 0.0)
        self.queue.schedule(
            t + local_ms, EventKindEnum.inference, drone.drone_id, compute_ms=local_ms, faults=seen, pass_ms=t
        )
        if computer is not None:
            self.queue.schedule(
                t + self.heavy_delay_ms,
                EventKindEnum.inference,
                computer.drone_id,
                compute_ms=self.heavy_delay_ms,
                faults=[],
                pass_ms=t,
                position=drone.position,
            )

    def _faults_in_range(self, position: GeoPoint) -> List[int]:
        reach = self.scenario.sensor_range_m
        if reach <= 0:
            return []
        return [
            f.fault_id
            for f in self.faults
            if f.fault_id in self.occurred
            and f.fault_id not in self.detections
            and f.fault_id not in self.reported
            and position.distance_to(f.position) <= reach
        ]

    def _on_inference(self, event: Event) -> None:
        drone, t = self.drones[event.subject], event.time_ms
        joules = self.model.compute_power_w * event.data["compute_ms"] / 1000.0
        if drone.depleted or not self._spend(drone, "compute", joules, t):
            self.reported.difference_update(event.data["faults"])
            self._job_done(t)
            return
        self.queue.schedule(t, EventKindEnum.encode, drone.drone_id, **event.data)

    def _job_done(self, t: float) -> None:
        self.processing -= 1
        self._check_progress(t)

    def _finding(self, drone: _Drone, position: GeoPoint, offloaded: bool):
        if self.spec.mission_type == MissionTypeEnum.road_inspection and not offloaded:
            return "RoadQuality", {
                "material": "asphalt",
                "friction_level": drone.captures % 5,
                "unevenness_level": (drone.captures // 5) % 5,
            }
        return "InspectionFinding", {
            "asset": _ASSET_FOR_MISSION[self.spec.mission_type],
            "defect": "none",
            "severity": 0,
            "x_m": position.x_m,
            "y_m": position.y_m,
        }

    def _on_encode(self, event: Event) -> None:
        drone, t = self.drones[event.subject], event.time_ms
        if drone.depleted:
            self.reported.difference_update(event.data["faults"])
            self._job_done(t)
            return
        position = event.data.get("position", drone.position)
        kind, fields = self._finding(drone, position, "position" in event.data)
        payload = semcomm_service.encode(fields, self.kb, kind)
        self._send(drone, kind, len(payload), [], event.data["pass_ms"], t)
        thermal = SensorEnum.thermal in self.spec.sensors
        for fault_id in event.data["faults"]:
            fault = self.faults[fault_id]
            report = {
                "fault_id": fault_id,
                "x_m": fault.position.x_m,
                "y_m": fault.position.y_m,
                "pass_time_ms": event.data["pass_ms"],
                "thermal_anomaly": thermal,
            }
            payload = semcomm_service.encode(report, self.kb, "FaultReport")
            self._send(drone, "FaultReport", len(payload), [fault_id], event.data["pass_ms"], t)
        self._job_done(t)

    def _send(self, drone: _Drone, kind: str, size_bytes: int, faults: List[int], pass_ms: float, t: float) -> None:
        relay = self._pick_relay(drone)
        message = _Message(
            message_id=f"m{len(self.messages):06d}",
            kind=kind,
            source=drone.drone_id,
            created_ms=t,
            size_bytes=size_bytes,
            route=[drone.drone_id] + ([relay.drone_id] if relay is not None else []),
            faults=list(faults),
            pass_ms=pass_ms,
        )
        self.messages[message.message_id] = message
        self.in_flight += 1
        self.queue.schedule(t, EventKindEnum.transmit, drone.drone_id, message_id=message.message_id, hop=0)

    def _lose(self, message: _Message) -> None:
        message.status = MessageStatusEnum.lost
        self.in_flight -= 1
        self.reported.difference_update(message.faults)
        logger.debug("message %s lost after %d attempts", message.message_id, message.attempts)

    def _on_transmit(self, event: Event) -> None:
        sender, t = self.drones[event.subject], event.time_ms
        message = self.messages[event.data["message_id"]]
        if sender.depleted:
            self._lose(message)
            self._check_progress(t)
            return
        bits = 8.0 * message.size_bytes
        result = transmit(
            bits,
            self.profile,
            sender.stream,
            n_drones=len(self.drones),
            max_swarm=self.scenario.max_swarm,
            retry_cap=self.scenario.retry_cap,
            timeout_factor=self.scenario.retransmit_timeout_factor,
        )
        message.attempts += result.attempts
        spent = self._spend(sender, "tx", result.attempts * bits * self.model.tx_j_per_bit, t)
        if not (spent and result.delivered):
            self._lose(message)
            self._check_progress(t)
            return
        self.queue.schedule(
            t + result.elapsed_ms, EventKindEnum.deliver, message.message_id, message_id=message.message_id, hop=event.data["hop"]
        )

    def _on_deliver(self, event: Event) -> None:
        t = event.time_ms
        message = self.messages[event.data["message_id"]]
        hop = event.data["hop"] + 1
        message.hops = hop
        if hop < len(message.route):
            self.queue.schedule(t, EventKindEnum.transmit, message.route[hop], message_id=message.message_id, hop=hop)
            return
        message.status = MessageStatusEnum.delivered
        message.delivered_ms = t
        fresh = [f for f in message.faults if f not in self.detections]
        if not fresh:
            self.in_flight -= 1
            self._check_progress(t)
            return
        message.pending_detections = len(fresh)
        for fault_id in fresh:
            self.queue.schedule(
                t, EventKindEnum.fault_detect, f"fault-{fault_id:04d}", fault_id=fault_id, message_id=message.message_id
            )

    def _on_fault_detect(self, event: Event) -> None:
        t = event.time_ms
        message = self.messages[event.data["message_id"]]
        fault_id = event.data["fault_id"]
        if fault_id not in self.detections:
            self.detections[fault_id] = (message.pass_ms, t, message.source)
        self.reported.discard(fault_id)
        message.pending_detections -= 1
        if message.pending_detections == 0:
            self.in_flight -= 1
            self._check_progress(t)

    def _on_start_charging(self, event: Event) -> None:
        drone, t = self.drones[event.subject], event.time_ms
        if drone.depleted or event.data["epoch"] != drone.epoch:
            return
        if not self._spend(drone, "cruise", self.model.cruise_j_per_m * event.data["distance"], t):
            return
        drone.position = drone.station
        duration_ms = 1000.0 * (drone.capacity_j - drone.energy_j) / self.model.charge_power_w
        self.queue.schedule(t + duration_ms, EventKindEnum.charge_complete, drone.drone_id, epoch=drone.epoch)

    def _on_charge_complete(self, event: Event) -> None:
        drone, t = self.drones[event.subject], event.time_ms
        if drone.depleted or event.data["epoch"] != drone.epoch:
            return
        drone.recharged_j += drone.capacity_j - drone.energy_j
        drone.energy_j = drone.capacity_j
        drone.role = RoleEnum.idle
        drone.station = None
        drone.hover_since_ms = t
        self.queue.schedule(t, EventKindEnum.replan, drone.drone_id)

    # results

    def _outcome(self, end_ms: float) -> SimOutcome:
        for drone in self.drones.values():
            self._settle(drone, end_ms)
        total_length = math.fsum(line.length_m for line in self.lines)
        swept_length = math.fsum(self.lines[i].length_m for i in self.swept)
        drones = [
            DroneOutcome(
                drone_id=d.drone_id,
                initial_energy_j=d.initial_energy_j,
                final_energy_j=d.energy_j,
                recharged_j=d.recharged_j,
                ledger=EnergyLedger(
                    cruise_j=d.ledger["cruise"],
                    hover_j=d.ledger["hover"],
                    compute_j=d.ledger["compute"],
                    tx_j=d.ledger["tx"],
                ),
                initial_role=d.initial_role,
                final_role=d.role,
                captures=d.captures,
                depleted_at_ms=d.depleted_at_ms,
            )
            for d in self.drones.values()
        ]
        faults = []
        for fault in self.faults:
            if fault.fault_id not in self.occurred:
                continue
            record = FaultRecord(fault_id=fault.fault_id, position=fault.position, occurred_ms=fault.occurred_ms)
            if fault.fault_id in self.detections:
                pass_ms, detected_ms, source = self.detections[fault.fault_id]
                record = record.model_copy(
                    update={
                        "detected": True,
                        "pass_ms": pass_ms,
                        "detected_ms": detected_ms,
                        "latency_ms": detected_ms - pass_ms,
                        "detected_by": source,
                    }
                )
            faults.append(record)
        messages = [
            MessageLogEntry(
                message_id=m.message_id,
                kind=m.kind,
                source_drone=m.source,
                created_ms=m.created_ms,
                delivered_ms=m.delivered_ms,
                attempts=m.attempts,
                hops=m.hops,
                size_bytes=m.size_bytes,
                status=m.status,
            )
            for m in self.messages.values()
        ]
        consumed = math.fsum(d.ledger.total_j for d in drones)
        tx = math.fsum(d.ledger.tx_j for d in drones)
        return SimOutcome(
            mission_id=self.spec.mission_id,
            seed=self.seed,
            policy=self.scenario.policy,
            network=self.scenario.network,
            transmission_mode=self.scenario.transmission_mode,
            end_reason=self.end_reason,
            operational_time_ms=end_ms,
            coverage_fraction=min(1.0, swept_length / total_length) if total_length > 0 else 0.0,
            drones=drones,
            faults=faults,
            messages=messages,
            tx_energy_share=tx / consumed if consumed > 0 else 0.0,
            reference_comm_share=self.scenario.reference_comm_share,
            events_processed=self.queue.processed,
            warnings=self.warnings,
        )


def run_mission(spec: MissionSpec, drones: Sequence[DroneState], scenario: SimScenario, seed: int) -> SimOutcome:
    violations = mission_service.validate(spec)
    if violations:
        raise MissionValidationError(violations)
    if not drones:
        raise ParameterError("run_mission needs at least one drone")
    ids = [d.drone_id for d in drones]
    if len(set(ids)) != len(ids):
        raise ParameterError("drone ids must be unique")
    outcome = _MissionRun(spec, drones, scenario, seed).run(drones)
    logger.info(
        "mission %s seed=%d policy=%s ended %s at %.0f ms, coverage %.3f, %d/%d faults detected",
        spec.mission_id,
        seed,
        scenario.policy.value,
        outcome.end_reason.value,
        outcome.operational_time_ms,
        outcome.coverage_fraction,
        outcome.faults_detected,
        outcome.faults_injected,
    )
    return outcome


def fleet_for_seed(fleet: FleetSpec, seed: int) -> List[DroneState]:
    return planner_service.random_fleet(
        derive_stream(seed, ["fleet"]),
        fleet.size,
        fleet.battery_min_pct,
        fleet.battery_max_pct,
        fleet.battery_capacity_j,
        fleet.launch,
    )


def _map_seeds(fn, seeds: Sequence[int], workers: int) -> list:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, seeds))
    return [fn(seed) for seed in seeds]


def compare_policies(
    scenario: MissionScenario,
    seeds: Sequence[int],
    baseline: PolicyEnum = PolicyEnum.static,
    candidate: PolicyEnum = PolicyEnum.energy_aware,
    workers: int = 1,
) -> PolicyComparison:
    """Paired operational times per seed and a one-sided sign test that the candidate lasts longer."""
    if len(seeds) < MIN_COMPARISON_SEEDS:
        raise ParameterError(f"compare_policies needs at least {MIN_COMPARISON_SEEDS} seeds, got {len(seeds)}")

    def one(seed: int) -> PairedOutcome:
        fleet = fleet_for_seed(scenario.fleet, seed)
        runs = {
            policy: run_mission(scenario.mission, fleet, scenario.simulation.model_copy(update={"policy": policy}), seed)
            for policy in (baseline, candidate)
        }
        base, cand = runs[baseline], runs[candidate]
        return PairedOutcome(
            seed=seed,
            baseline_time_ms=base.operational_time_ms,
            candidate_time_ms=cand.operational_time_ms,
            delta_ms=cand.operational_time_ms - base.operational_time_ms,
            baseline_end=base.end_reason,
            candidate_end=cand.end_reason,
        )

    pairs = _map_seeds(one, seeds, workers)
    wins = sum(1 for p in pairs if p.delta_ms > 0)
    losses = sum(1 for p in pairs if p.delta_ms < 0)
    decided = wins + losses
    p_value = binomtest(wins, decided, 0.5, alternative="greater").pvalue if decided else 1.0
    return PolicyComparison(
        baseline=baseline,
        candidate=candidate,
        pairs=pairs,
        mean_delta_ms=math.fsum(p.delta_ms for p in pairs) / len(pairs),
        wins=wins,
        losses=losses,
        ties=len(pairs) - decided,
        p_value=float(p_value),
    )


def compare_modes(scenario: MissionScenario, seeds: Sequence[int], workers: int = 1) -> List[ModeComparisonRow]:
    """Transmit-energy share of semantic versus raw links on the same fleet and seed."""

    def one(seed: int) -> ModeComparisonRow:
        fleet = fleet_for_seed(scenario.fleet, seed)
        runs = {
            mode: run_mission(
                scenario.mission, fleet, scenario.simulation.model_copy(update={"transmission_mode": mode}), seed
            )
            for mode in (TransmissionModeEnum.semantic, TransmissionModeEnum.raw)
        }
        semantic, raw = runs[TransmissionModeEnum.semantic], runs[TransmissionModeEnum.raw]
        return ModeComparisonRow(
            seed=seed,
            semantic_tx_share=semantic.tx_energy_share,
            raw_tx_share=raw.tx_energy_share,
            semantic_tx_j=math.fsum(d.ledger.tx_j for d in semantic.drones),
            raw_tx_j=math.fsum(d.ledger.tx_j for d in raw.drones),
        )

    return _map_seeds(one, seeds, workers)


def default_scenario() -> MissionScenario:
    """Persistent road patrol with one central charging station."""
    side = 200.0
    mission = MissionSpec(
        mission_id="mission-default-patrol",
        mission_type=MissionTypeEnum.road_inspection,
        objectives=[ObjectiveEnum.fault_detection],
        perimeter=Polygon(vertices=[GeoPoint(x_m=x, y_m=y) for x, y in ((0, 0), (side, 0), (side, side), (0, side))]),
        sensors=frozenset({SensorEnum.rgb}),
        expected_outputs=[OutputEnum.fault_report],
        constraints=MissionConstraints(max_duration_min=10.0, min_battery_reserve_pct=20.0),
    )
    simulation = SimScenario(repeat_coverage=True, stations=[GeoPoint(x_m=side / 2, y_m=side / 2)])
    return MissionScenario(mission=mission, simulation=simulation, fleet=FleetSpec())


def serialize_outcome(outcome: SimOutcome) -> str:
    return dump_document("outcome", outcome.model_dump(mode="json"))


def deserialize_outcome(text: str) -> SimOutcome:
    return load_model(read_document(text, expected_kind="outcome", max_version=1), SimOutcome)
