import enum


class NetworkEnum(str, enum.Enum):
    five_g = "5G"
    six_g = "6G"


class ModeEnum(str, enum.Enum):
    table_calibrated = "TableCalibrated"
    literal_formula = "LiteralFormula"


class MetricEnum(str, enum.Enum):
    collision_rate_pct = "CollisionRatePct"
    detection_time_ms = "DetectionTimeMs"


class MissionTypeEnum(str, enum.Enum):
    road_inspection = "RoadInspection"
    building_inspection = "BuildingInspection"
    bridge_inspection = "BridgeInspection"
    power_line_inspection = "PowerLineInspection"
    fire_hydrant_inspection = "FireHydrantInspection"
    construction_monitoring = "ConstructionMonitoring"


class ObjectiveEnum(str, enum.Enum):
    routine_inspection = "RoutineInspection"
    fault_detection = "FaultDetection"
    severity_assessment = "SeverityAssessment"
    progress_monitoring = "ProgressMonitoring"


class SensorEnum(str, enum.Enum):
    rgb = "RGB"
    thermal = "Thermal"
    lidar = "LiDAR"


class OutputEnum(str, enum.Enum):
    fault_report = "FaultReport"
    severity_map = "SeverityMap"
    coverage_log = "CoverageLog"


class ViolationCodeEnum(str, enum.Enum):
    empty_mission_id = "EmptyMissionId"
    empty_objectives = "EmptyObjectives"
    empty_sensors = "EmptySensors"
    invalid_perimeter = "InvalidPerimeter"
    inconsistent_objectives = "InconsistentObjectives"
    non_positive_duration = "NonPositiveDuration"
    reserve_out_of_range = "ReserveOutOfRange"


class RoleEnum(str, enum.Enum):
    collector = "Collector"
    computer = "Computer"
    relay = "Relay"
    charging = "Charging"
    idle = "Idle"


class PolicyEnum(str, enum.Enum):
    energy_aware = "EnergyAware"
    static = "Static"


class TransmissionModeEnum(str, enum.Enum):
    semantic = "semantic"
    raw = "raw"


class FieldTypeEnum(str, enum.Enum):
    unsigned = "uint"
    signed = "int"
    real = "float"
    choice = "enum"
    flag = "bool"


# Declaration order is the tie-break order for simultaneous events.
class EventKindEnum(str, enum.Enum):
    mission_end = "MissionEnd"
    charge_complete = "ChargeComplete"
    start_charging = "StartCharging"
    battery_check = "BatteryCheck"
    replan = "Replan"
    fault_occur = "FaultOccur"
    arrive_waypoint = "ArriveWaypoint"
    sensor_capture = "SensorCapture"
    inference = "Inference"
    encode = "Encode"
    transmit = "Transmit"
    deliver = "Deliver"
    fault_detect = "FaultDetect"


class EndReasonEnum(str, enum.Enum):
    coverage_complete = "CoverageComplete"
    duration_cap = "DurationCap"
    swarm_exhausted = "SwarmExhausted"


class MessageStatusEnum(str, enum.Enum):
    delivered = "Delivered"
    lost = "Lost"
    in_flight = "InFlight"


class ReportFormatEnum(str, enum.Enum):
    markdown = "Markdown"
    structured_document = "StructuredDocument"
