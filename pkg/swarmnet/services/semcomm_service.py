"""Schema-driven semantic codec and the raw-versus-semantic bandwidth comparison.

Payload layout, all big-endian::

    kb_id    u32
    version  u16
    kind     u16   (message code from the knowledge base)
    fields   in schema order, each at its declared width

Enum fields travel as the index of the value in the descriptor's choices.
"""
import logging
import math
import re
import struct
import threading
from typing import Any, Dict, List, Mapping, Optional, Sequence

from swarmnet.models.enums import FieldTypeEnum, TransmissionModeEnum
from swarmnet.schemas.semcomm import (
    BandwidthRow,
    FieldDescriptor,
    KnowledgeBase,
    MessageSchema,
    SemanticConfig,
    SemanticMessage,
    VideoProfile,
)
from swarmnet.utils.errors import KnowledgeBaseMismatch, MalformedPayload, ParameterError, SchemaViolation

logger = logging.getLogger(__name__)

HEADER = struct.Struct(">IHH")
CLAIMED_REDUCTION = 0.60

DEFAULT_PROFILES: List[VideoProfile] = [
    VideoProfile(name="480p15", width_px=640, height_px=480, fps=15),
    VideoProfile(name="480p30", width_px=640, height_px=480, fps=30),
    VideoProfile(name="720p30", width_px=1280, height_px=720, fps=30),
    VideoProfile(name="1080p30", width_px=1920, height_px=1080, fps=30),
    VideoProfile(name="1080p60", width_px=1920, height_px=1080, fps=60),
    VideoProfile(name="2160p30", width_px=3840, height_px=2160, fps=30),
]

_PROFILE = re.compile(r"^(\d+)x(\d+)@(\d+(?:\.\d+)?)$")


def parse_profile(text: str) -> VideoProfile:
    """A default profile by name (``1080p30``) or an explicit ``WIDTHxHEIGHT@FPS``."""
    for profile in DEFAULT_PROFILES:
        if profile.name == text:
            return profile
    match = _PROFILE.match(text.strip())
    if match is None:
        names = ", ".join(p.name for p in DEFAULT_PROFILES)
        raise ParameterError(f"unknown video profile '{text}'; use WIDTHxHEIGHT@FPS or one of: {names}")
    width, height, fps = match.groups()
    return VideoProfile(width_px=int(width), height_px=int(height), fps=float(fps))


def _field(name, semantic_type, width, unit="", choices=()) -> FieldDescriptor:
    return FieldDescriptor(name=name, semantic_type=semantic_type, width_bytes=width, unit=unit, choices=tuple(choices))


def default_knowledge_base() -> KnowledgeBase:
    """Shared knowledge base for infrastructure inspection messages."""
    u, i, f, e, b = (
        FieldTypeEnum.unsigned,
        FieldTypeEnum.signed,
        FieldTypeEnum.real,
        FieldTypeEnum.choice,
        FieldTypeEnum.flag,
    )
    return KnowledgeBase(
        kb_id=0x5357,
        version=1,
        entries={
            "RoadQuality": MessageSchema(
                code=1,
                fields=(
                    _field("material", e, 1, choices=("asphalt", "concrete", "gravel", "cobblestone", "dirt")),
                    _field("friction_level", u, 1, unit="level"),
                    _field("unevenness_level", u, 1, unit="level"),
                ),
            ),
            "PotholeDetection": MessageSchema(
                code=2,
                fields=(
                    _field("x_m", f, 4, unit="m"),
                    _field("y_m", f, 4, unit="m"),
                    _field("diameter_cm", u, 2, unit="cm"),
                    _field("depth_cm", u, 2, unit="cm"),
                    _field("confidence_pct", u, 1, unit="%"),
                ),
            ),
            "InspectionFinding": MessageSchema(
                code=3,
                fields=(
                    _field("asset", e, 1, choices=("road", "building", "bridge", "power_line", "fire_hydrant", "site")),
                    _field("defect", e, 1, choices=("none", "crack", "corrosion", "spalling", "leak", "hotspot", "other")),
                    _field("severity", u, 1, unit="level"),
                    _field("x_m", f, 4, unit="m"),
                    _field("y_m", f, 4, unit="m"),
                ),
            ),
            "FaultReport": MessageSchema(
                code=4,
                fields=(
                    _field("fault_id", u, 4),
                    _field("x_m", f, 4, unit="m"),
                    _field("y_m", f, 4, unit="m"),
                    _field("pass_time_ms", f, 8, unit="ms"),
                    _field("thermal_anomaly", b, 1),
                ),
            ),
            "Telemetry": MessageSchema(
                code=5,
                fields=(
                    _field("battery_pct", f, 4, unit="%"),
                    _field("x_m", f, 4, unit="m"),
                    _field("y_m", f, 4, unit="m"),
                    _field("altitude_dm", i, 2, unit="dm"),
                    _field("role", e, 1, choices=("Collector", "Computer", "Relay", "Charging", "Idle")),
                ),
            ),
        },
    )


class KnowledgeBaseRegistry:
    """Published knowledge bases keyed by (kb_id, version); versions only move forward."""

    def __init__(self, bases: Sequence[KnowledgeBase] = ()):
        self._bases: Dict[tuple, KnowledgeBase] = {}
        self._lock = threading.Lock()
        for kb in bases:
            self.publish(kb)

    def publish(self, kb: KnowledgeBase) -> KnowledgeBase:
        key = (kb.kb_id, kb.version)
        with self._lock:
            existing = self._bases.get(key)
            if existing is not None:
                if existing != kb:
                    raise KnowledgeBaseMismatch(
                        f"knowledge base {kb.kb_id:#x} v{kb.version} already published with different entries"
                    )
                return existing
            latest = self._latest_version(kb.kb_id)
            if latest is not None and kb.version < latest:
                raise KnowledgeBaseMismatch(
                    f"knowledge base {kb.kb_id:#x} v{kb.version} is older than published v{latest}"
                )
            self._bases[key] = kb
        logger.debug("published knowledge base %#x v%d", kb.kb_id, kb.version)
        return kb

    def _latest_version(self, kb_id: int) -> Optional[int]:
        versions = [version for (known, version) in self._bases if known == kb_id]
        return max(versions) if versions else None

    def lookup(self, kb_id: int, version: int) -> KnowledgeBase:
        kb = self._bases.get((kb_id, version))
        if kb is None:
            raise KnowledgeBaseMismatch(f"no knowledge base {kb_id:#x} v{version} is held")
        return kb

    def latest(self, kb_id: int) -> KnowledgeBase:
        version = self._latest_version(kb_id)
        if version is None:
            raise KnowledgeBaseMismatch(f"no knowledge base {kb_id:#x} is held")
        return self._bases[(kb_id, version)]

    def decode(self, payload: bytes, **context) -> SemanticMessage:
        kb_id, version, _ = _read_header(payload)
        return decode(payload, self.lookup(kb_id, version), **context)


def _schema(kb: KnowledgeBase, kind: str) -> MessageSchema:
    schema = kb.entries.get(kind)
    if schema is None:
        raise SchemaViolation(f"message kind '{kind}' is not in knowledge base {kb.kb_id:#x} v{kb.version}", field=kind)
    return schema


def _checked_value(descriptor: FieldDescriptor, value: Any) -> Any:
    name, kind = descriptor.name, descriptor.semantic_type
    if kind == FieldTypeEnum.flag:
        if not isinstance(value, bool):
            raise SchemaViolation(f"field '{name}' must be a boolean, got {value!r}", field=name)
        return value
    if kind == FieldTypeEnum.choice:
        if value not in descriptor.choices:
            raise SchemaViolation(f"field '{name}' must be one of {list(descriptor.choices)}, got {value!r}", field=name)
        return value
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise SchemaViolation(f"field '{name}' must be numeric, got {value!r}", field=name)
    if kind == FieldTypeEnum.real:
        if not math.isfinite(value):
            raise SchemaViolation(f"field '{name}' must be finite, got {value!r}", field=name)
        return float(value)
    if isinstance(value, float) and not value.is_integer():
        raise SchemaViolation(f"field '{name}' must be an integer, got {value!r}", field=name)
    bits = 8 * descriptor.width_bytes
    low, high = (0, (1 << bits) - 1) if kind == FieldTypeEnum.unsigned else (-(1 << (bits - 1)), (1 << (bits - 1)) - 1)
    value = int(value)
    if not low <= value <= high:
        raise SchemaViolation(f"field '{name}' must be within [{low}, {high}], got {value}", field=name)
    return value


def _conforming(schema: MessageSchema, fields: Mapping[str, Any]) -> Dict[str, Any]:
    expected = [d.name for d in schema.fields]
    for name in fields:
        if name not in expected:
            raise SchemaViolation(f"field '{name}' is not part of the schema", field=name)
    values = {}
    for descriptor in schema.fields:
        if descriptor.name not in fields:
            raise SchemaViolation(f"field '{descriptor.name}' is missing", field=descriptor.name)
        values[descriptor.name] = _checked_value(descriptor, fields[descriptor.name])
    return values


def _pack_field(descriptor: FieldDescriptor, value: Any) -> bytes:
    if descriptor.semantic_type == FieldTypeEnum.choice:
        value = descriptor.choices.index(value)
    try:
        return struct.pack(">" + descriptor.wire_format, value)
    except (OverflowError, struct.error) as exc:
        raise SchemaViolation(f"field '{descriptor.name}' does not fit its wire format: {exc}", field=descriptor.name) from exc


def payload_size(kb: KnowledgeBase, kind: str) -> int:
    return HEADER.size + _schema(kb, kind).payload_width


def encode(fields: Mapping[str, Any], kb: KnowledgeBase, kind: str) -> bytes:
    """Fixed-width payload for ``fields``.

    Real fields travel as float32, so decoding gives back ``fields`` exactly only when they
    were built by ``compose_message``; raw float64 values come back rounded to float32.
    """
    schema = _schema(kb, kind)
    values = _conforming(schema, fields)
    body = b"".join(_pack_field(d, values[d.name]) for d in schema.fields)
    return HEADER.pack(kb.kb_id, kb.version, schema.code) + body


def encode_message(message: SemanticMessage, kb: KnowledgeBase) -> bytes:
    if (message.kb_id, message.kb_version) != (kb.kb_id, kb.version):
        raise KnowledgeBaseMismatch(
            f"message was composed against {message.kb_id:#x} v{message.kb_version}, "
            f"encoder holds {kb.kb_id:#x} v{kb.version}"
        )
    return encode(message.fields, kb, message.message_kind)


def compose_message(
    kb: KnowledgeBase,
    kind: str,
    fields: Mapping[str, Any],
    source_drone: Optional[str] = None,
    timestamp_ms: Optional[float] = None,
) -> SemanticMessage:
    """Build a message whose values are already in their wire representation."""
    schema = _schema(kb, kind)
    values = _conforming(schema, fields)
    for descriptor in schema.fields:
        if descriptor.semantic_type == FieldTypeEnum.real:
            (values[descriptor.name],) = struct.unpack(
                ">" + descriptor.wire_format, _pack_field(descriptor, values[descriptor.name])
            )
    return SemanticMessage(
        kb_id=kb.kb_id,
        kb_version=kb.version,
        message_kind=kind,
        fields=values,
        source_drone=source_drone,
        timestamp_ms=timestamp_ms,
    )


def _read_header(payload: bytes):
    if len(payload) < HEADER.size:
        raise MalformedPayload(f"payload of {len(payload)} bytes is shorter than the {HEADER.size}-byte header")
    return HEADER.unpack_from(payload)


def decode(
    payload: bytes,
    kb: KnowledgeBase,
    source_drone: Optional[str] = None,
    timestamp_ms: Optional[float] = None,
) -> SemanticMessage:
    kb_id, version, code = _read_header(payload)
    if (kb_id, version) != (kb.kb_id, kb.version):
        raise KnowledgeBaseMismatch(
            f"payload uses knowledge base {kb_id:#x} v{version}, receiver holds {kb.kb_id:#x} v{kb.version}"
        )
    kind = kb.kind_for_code(code)
    if kind is None:
        raise MalformedPayload(f"unknown message code {code}")
    schema = kb.entries[kind]
    expected = HEADER.size + schema.payload_width
    if len(payload) != expected:
        raise MalformedPayload(f"{kind} payload must be {expected} bytes, got {len(payload)}")

    values: Dict[str, Any] = {}
    offset = HEADER.size
    for descriptor in schema.fields:
        (raw,) = struct.unpack_from(">" + descriptor.wire_format, payload, offset)
        offset += descriptor.width_bytes
        if descriptor.semantic_type == FieldTypeEnum.choice:
            if raw >= len(descriptor.choices):
                raise MalformedPayload(f"field '{descriptor.name}' carries unknown choice index {raw}")
            raw = descriptor.choices[raw]
        elif descriptor.semantic_type == FieldTypeEnum.flag:
            if payload[offset - 1] not in (0, 1):
                raise MalformedPayload(f"field '{descriptor.name}' is not a valid boolean byte")
        elif descriptor.semantic_type == FieldTypeEnum.real and not math.isfinite(raw):
            raise MalformedPayload(f"field '{descriptor.name}' is not finite")
        values[descriptor.name] = raw
    return SemanticMessage(
        kb_id=kb_id,
        kb_version=version,
        message_kind=kind,
        fields=values,
        source_drone=source_drone,
        timestamp_ms=timestamp_ms,
    )


def raw_bandwidth(profile: VideoProfile) -> float:
    return profile.width_px * profile.height_px * profile.bits_per_pixel * profile.fps * profile.compression_factor


def semantic_bandwidth(message_size_bytes: float, message_rate_hz: float) -> float:
    if not (message_size_bytes > 0 and message_rate_hz > 0):
        raise ParameterError(
            f"message size and rate must be positive, got {message_size_bytes} bytes at {message_rate_hz} Hz"
        )
    return 8.0 * message_size_bytes * message_rate_hz


def reduction_ratio(raw_bps: float, semantic_bps: float) -> float:
    if not (raw_bps > 0 and semantic_bps > 0):
        raise ParameterError(f"bandwidths must be positive, got raw={raw_bps} semantic={semantic_bps}")
    reduction = 1.0 - semantic_bps / raw_bps
    if reduction < 0:
        logger.warning("semantic stream (%.0f b/s) exceeds raw stream (%.0f b/s); reduction reported as 0", semantic_bps, raw_bps)
        return 0.0
    return reduction


def meets_claim(reduction: float) -> bool:
    return reduction >= CLAIMED_REDUCTION


def bandwidth_table(
    profiles: Optional[Sequence[VideoProfile]] = None,
    config: Optional[SemanticConfig] = None,
) -> List[BandwidthRow]:
    """Raw and semantic rows per profile, ordered by raw bandwidth ascending."""
    profiles = DEFAULT_PROFILES if profiles is None else list(profiles)
    if not profiles:
        raise ParameterError("bandwidth_table needs at least one video profile")
    config = config or SemanticConfig()
    rows = []
    for profile in sorted(profiles, key=lambda p: (raw_bandwidth(p), p.label)):
        raw = raw_bandwidth(profile)
        semantic = semantic_bandwidth(config.message_size_bytes, config.messages_per_frame * profile.fps)
        reduction = reduction_ratio(raw, semantic)
        rows.append(
            BandwidthRow(profile=profile.label, mode=TransmissionModeEnum.raw, bits_per_second=raw, reduction=0.0, meets_claim=False)
        )
        rows.append(
            BandwidthRow(
                profile=profile.label,
                mode=TransmissionModeEnum.semantic,
                bits_per_second=semantic,
                reduction=reduction,
                meets_claim=meets_claim(reduction),
            )
        )
    return rows
