"""Mission parsing, validation and documents.

Free-text requests are mapped onto a ``MissionSpec`` with a first-match keyword
rule table. An external intent provider (for instance a language model wrapped
in a callable) can be plugged in ahead of the rules.
"""
import hashlib
import logging
import math
import re
from typing import Dict, FrozenSet, List, Optional, Sequence

from swarmnet.models.enums import (
    MissionTypeEnum,
    ObjectiveEnum,
    OutputEnum,
    SensorEnum,
    ViolationCodeEnum,
)
from swarmnet.schemas.core import GeoPoint, Polygon
from swarmnet.schemas.mission import (
    IntentProvider,
    IntentRule,
    MissionConstraints,
    MissionDefaults,
    MissionSpec,
    Violation,
)
from swarmnet.utils.documents import Document, dump_document, load_model, read_document
from swarmnet.utils.errors import IncompleteMission, MissionValidationError, UnrecognizedIntent
from swarmnet.utils.geometry import perimeter_problems

logger = logging.getLogger(__name__)

RULE_TABLE_VERSION = 1
MISSION_SCHEMA_VERSION = 1

_FAULT_OBJECTIVES = (
    ObjectiveEnum.routine_inspection,
    ObjectiveEnum.fault_detection,
    ObjectiveEnum.severity_assessment,
)

COMPATIBLE_OBJECTIVES: Dict[MissionTypeEnum, FrozenSet[ObjectiveEnum]] = {
    MissionTypeEnum.road_inspection: frozenset(_FAULT_OBJECTIVES),
    MissionTypeEnum.building_inspection: frozenset(_FAULT_OBJECTIVES),
    MissionTypeEnum.bridge_inspection: frozenset(_FAULT_OBJECTIVES),
    MissionTypeEnum.power_line_inspection: frozenset(_FAULT_OBJECTIVES),
    MissionTypeEnum.fire_hydrant_inspection: frozenset(_FAULT_OBJECTIVES),
    MissionTypeEnum.construction_monitoring: frozenset(
        {ObjectiveEnum.routine_inspection, ObjectiveEnum.progress_monitoring}
    ),
}

# First match wins: specific assets come before the generic ones they may mention.
INTENT_RULES: List[IntentRule] = [
    IntentRule(
        name="fire-hydrant",
        keywords=("fire hydrant", "hydrant"),
        mission_type=MissionTypeEnum.fire_hydrant_inspection,
        objectives=(ObjectiveEnum.routine_inspection,),
        sensors=(SensorEnum.rgb,),
    ),
    IntentRule(
        name="power-line",
        keywords=("power line", "powerline", "transmission line", "electric pole", "utility pole", "pylon"),
        mission_type=MissionTypeEnum.power_line_inspection,
        objectives=(ObjectiveEnum.fault_detection,),
        sensors=(SensorEnum.rgb, SensorEnum.thermal),
    ),
    IntentRule(
        name="bridge",
        keywords=("bridge", "overpass", "viaduct"),
        mission_type=MissionTypeEnum.bridge_inspection,
        objectives=(ObjectiveEnum.routine_inspection,),
        sensors=(SensorEnum.rgb, SensorEnum.lidar),
    ),
    IntentRule(
        name="construction",
        keywords=("construction", "building site", "site progress"),
        mission_type=MissionTypeEnum.construction_monitoring,
        objectives=(ObjectiveEnum.progress_monitoring,),
        sensors=(SensorEnum.rgb, SensorEnum.lidar),
    ),
    IntentRule(
        name="building",
        keywords=("building", "facade", "façade", "roof", "tower block"),
        mission_type=MissionTypeEnum.building_inspection,
        objectives=(ObjectiveEnum.routine_inspection,),
        sensors=(SensorEnum.rgb,),
    ),
    IntentRule(
        name="road",
        keywords=("road", "pothole", "pavement", "street", "highway", "asphalt", "lane"),
        mission_type=MissionTypeEnum.road_inspection,
        objectives=(ObjectiveEnum.routine_inspection,),
        sensors=(SensorEnum.rgb,),
    ),
]

OBJECTIVE_KEYWORDS: Dict[ObjectiveEnum, Sequence[str]] = {
    ObjectiveEnum.routine_inspection: ("routine", "survey", "periodic", "regular"),
    ObjectiveEnum.fault_detection: ("fault", "defect", "crack", "pothole", "anomal", "damage", "corrosion", "leak"),
    ObjectiveEnum.severity_assessment: ("severity", "assess", "how bad"),
    ObjectiveEnum.progress_monitoring: ("progress",),
}

SENSOR_KEYWORDS: Dict[SensorEnum, Sequence[str]] = {
    SensorEnum.rgb: ("rgb", "camera", "visual", "photo"),
    SensorEnum.thermal: ("thermal", "infrared", "heat"),
    SensorEnum.lidar: ("lidar", "point cloud", "3d scan"),
}

OUTPUT_FOR_OBJECTIVE: Dict[ObjectiveEnum, OutputEnum] = {
    ObjectiveEnum.fault_detection: OutputEnum.fault_report,
    ObjectiveEnum.severity_assessment: OutputEnum.severity_map,
    ObjectiveEnum.routine_inspection: OutputEnum.coverage_log,
    ObjectiveEnum.progress_monitoring: OutputEnum.coverage_log,
}

_POINT = re.compile(r"\(\s*(-?\d+(?:\.\d+)?)\s*,\s*(-?\d+(?:\.\d+)?)\s*\)")
_DURATION = re.compile(r"(\d+(?:\.\d+)?)\s*(?:minutes|minute|mins|min)\b")
_RESERVE = re.compile(r"(\d+(?:\.\d+)?)\s*%\s*(?:battery\s+)?reserve")


def _mentions(text: str, keyword: str) -> bool:
    """Prefix match: objective and sensor keywords are stems ("anomal", "crack")."""
    return re.search(r"\b" + re.escape(keyword), text) is not None


def _names(text: str, keyword: str) -> bool:
    """Whole-word match, plural allowed: "lane" finds "lanes" but not "laneway"."""
    return re.search(r"\b" + re.escape(keyword) + r"(?:s|es)?\b", text) is not None


def candidate_keywords() -> List[str]:
    return sorted({keyword for rule in INTENT_RULES for keyword in rule.keywords})


def match_rule(text: str) -> Optional[IntentRule]:
    lowered = " ".join(text.lower().split())
    for rule in INTENT_RULES:
        if any(_names(lowered, keyword) for keyword in rule.keywords):
            return rule
    return None


def _in_enum_order(values, enum_type) -> list:
    order = list(enum_type)
    return sorted(set(values), key=order.index)


def _objectives(text: str, rule: IntentRule, defaults: MissionDefaults) -> List[ObjectiveEnum]:
    found = [objective for objective, words in OBJECTIVE_KEYWORDS.items() if any(_mentions(text, w) for w in words)]
    objectives = found or list(defaults.objectives or rule.objectives)
    allowed = COMPATIBLE_OBJECTIVES[rule.mission_type]
    if not any(objective in allowed for objective in objectives):
        objectives.extend(rule.objectives)
    return _in_enum_order(objectives, ObjectiveEnum)


def _sensors(text: str, rule: IntentRule, defaults: MissionDefaults) -> FrozenSet[SensorEnum]:
    found = {sensor for sensor, words in SENSOR_KEYWORDS.items() if any(_mentions(text, w) for w in words)}
    if found:
        return frozenset(found)
    return frozenset(defaults.sensors or rule.sensors)


def _perimeter(text: str, defaults: MissionDefaults) -> Polygon:
    pairs = _POINT.findall(text)
    if len(pairs) >= 3:
        return Polygon(vertices=[GeoPoint(x_m=float(x), y_m=float(y)) for x, y in pairs])
    if defaults.perimeter is not None:
        return defaults.perimeter
    raise IncompleteMission("request names no perimeter and no default perimeter was given")


def _constraints(text: str, defaults: MissionDefaults) -> MissionConstraints:
    base = defaults.constraints or MissionConstraints()
    duration = _DURATION.search(text)
    reserve = _RESERVE.search(text)
    return MissionConstraints(
        max_duration_min=float(duration.group(1)) if duration else base.max_duration_min,
        min_battery_reserve_pct=float(reserve.group(1)) if reserve else base.min_battery_reserve_pct,
    )


def _mission_id(text: str) -> str:
    digest = hashlib.blake2b(f"{RULE_TABLE_VERSION}:{text}".encode("utf-8"), digest_size=5)
    return f"mission-{digest.hexdigest()}"


def parse_request(
    text: str,
    defaults: Optional[MissionDefaults] = None,
    provider: Optional[IntentProvider] = None,
) -> MissionSpec:
    if not text or not text.strip():
        raise IncompleteMission("inspection request is empty")
    defaults = defaults or MissionDefaults()

    if provider is not None:
        provided = provider(text, defaults)
        if provided is not None:
            return _checked(provided)

    normalized = " ".join(text.lower().split())
    rule = match_rule(normalized)
    if rule is None:
        raise UnrecognizedIntent("no inspection target recognised in request", candidates=candidate_keywords())

    objectives = _objectives(normalized, rule, defaults)
    outputs = defaults.expected_outputs or _in_enum_order(
        [OUTPUT_FOR_OBJECTIVE[objective] for objective in objectives], OutputEnum
    )
    spec = MissionSpec(
        mission_id=defaults.mission_id or _mission_id(normalized),
        mission_type=rule.mission_type,
        objectives=objectives,
        perimeter=_perimeter(text, defaults),
        sensors=_sensors(normalized, rule, defaults),
        expected_outputs=list(outputs),
        constraints=_constraints(normalized, defaults),
    )
    logger.debug("request matched rule %s -> %s", rule.name, spec.mission_type.value)
    return _checked(spec)


def _checked(spec: MissionSpec) -> MissionSpec:
    violations = validate(spec)
    if violations:
        raise MissionValidationError(violations)
    return spec


def validate(spec: MissionSpec) -> List[Violation]:
    violations = []
    if not spec.mission_id.strip():
        violations.append(Violation(code=ViolationCodeEnum.empty_mission_id, field="mission_id", message="mission_id is blank"))
    if not spec.objectives:
        violations.append(Violation(code=ViolationCodeEnum.empty_objectives, field="objectives", message="no objectives"))
    elif not any(o in COMPATIBLE_OBJECTIVES[spec.mission_type] for o in spec.objectives):
        violations.append(
            Violation(
                code=ViolationCodeEnum.inconsistent_objectives,
                field="objectives",
                message=f"none of the objectives applies to {spec.mission_type.value}",
            )
        )
    if not spec.sensors:
        violations.append(Violation(code=ViolationCodeEnum.empty_sensors, field="sensors", message="no sensors"))
    problems = perimeter_problems(spec.perimeter)
    if problems:
        violations.append(Violation(code=ViolationCodeEnum.invalid_perimeter, field="perimeter", message="; ".join(problems)))
    duration = spec.constraints.max_duration_min
    if not (math.isfinite(duration) and duration > 0):
        violations.append(
            Violation(
                code=ViolationCodeEnum.non_positive_duration,
                field="constraints.max_duration_min",
                message=f"max_duration_min must be positive, got {duration}",
            )
        )
    reserve = spec.constraints.min_battery_reserve_pct
    if not 0.0 <= reserve <= 100.0:
        violations.append(
            Violation(
                code=ViolationCodeEnum.reserve_out_of_range,
                field="constraints.min_battery_reserve_pct",
                message=f"min_battery_reserve_pct must be within [0, 100], got {reserve}",
            )
        )
    return violations


def mission_body(spec: MissionSpec) -> dict:
    body = spec.model_dump(mode="json")
    body["perimeter"] = spec.perimeter.as_pairs()
    return body


def serialize(spec: MissionSpec) -> str:
    return dump_document("mission", mission_body(spec), MISSION_SCHEMA_VERSION)


def deserialize(text: str) -> MissionSpec:
    document = read_document(text, expected_kind="mission", max_version=MISSION_SCHEMA_VERSION)
    return load_model(document, MissionSpec)


def read_any(text: str) -> Document:
    """Read a structured document of any kind (missions, plans, reports, ...)."""
    return read_document(text)
