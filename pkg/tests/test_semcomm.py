import math
import struct

import pytest
from pydantic import ValidationError

from swarmnet.models.enums import FieldTypeEnum, TransmissionModeEnum
from swarmnet.schemas.semcomm import FieldDescriptor, KnowledgeBase, MessageSchema, SemanticConfig, VideoProfile
from swarmnet.services import semcomm_service
from swarmnet.services.semcomm_service import HEADER
from swarmnet.utils.errors import KnowledgeBaseMismatch, MalformedPayload, ParameterError, SchemaViolation
from swarmnet.utils.rng import derive_stream

ROAD = {"material": "asphalt", "friction_level": 3, "unevenness_level": 1}


@pytest.fixture
def kb():
    return semcomm_service.default_knowledge_base()


@pytest.fixture
def kb_v2(kb):
    return kb.model_copy(update={"version": 2})


def _random_value(descriptor, stream):
    kind = descriptor.semantic_type
    if kind == FieldTypeEnum.flag:
        return bool(stream.integers(0, 2))
    if kind == FieldTypeEnum.choice:
        return descriptor.choices[int(stream.integers(0, len(descriptor.choices)))]
    if kind == FieldTypeEnum.real:
        return float(stream.normal()) * 1000.0
    bits = 8 * descriptor.width_bytes
    if kind == FieldTypeEnum.unsigned:
        return int(stream.integers(0, 1 << bits))
    return int(stream.integers(-(1 << (bits - 1)), 1 << (bits - 1)))


def test_road_quality_payload_is_eleven_bytes(kb):
    assert semcomm_service.payload_size(kb, "RoadQuality") == 11
    assert len(semcomm_service.encode(ROAD, kb, "RoadQuality")) == 11


def test_header_layout(kb):
    payload = semcomm_service.encode(ROAD, kb, "RoadQuality")
    assert HEADER.unpack_from(payload) == (0x5357, 1, 1)
    # enum index, then the two levels
    assert payload[8:] == bytes([0, 3, 1])


def test_randomized_messages_round_trip(kb):
    kinds = sorted(kb.entries)
    stream = derive_stream(17, ["codec"])
    for _ in range(10_000):
        kind = kinds[int(stream.integers(0, len(kinds)))]
        fields = {d.name: _random_value(d, stream) for d in kb.entries[kind].fields}
        message = semcomm_service.compose_message(kb, kind, fields, source_drone="d01", timestamp_ms=5.0)
        decoded = semcomm_service.decode(
            semcomm_service.encode_message(message, kb), kb, source_drone="d01", timestamp_ms=5.0
        )
        assert decoded == message


def test_version_mismatch_always_fails_closed(kb, kb_v2):
    stream = derive_stream(18, ["mismatch"])
    schema = kb.entries["FaultReport"]
    for _ in range(200):
        fields = {d.name: _random_value(d, stream) for d in schema.fields}
        payload = semcomm_service.encode(fields, kb, "FaultReport")
        with pytest.raises(KnowledgeBaseMismatch):
            semcomm_service.decode(payload, kb_v2)


def test_compose_quantizes_reals(kb):
    message = semcomm_service.compose_message(
        kb, "PotholeDetection", {"x_m": 0.1, "y_m": 2.5, "diameter_cm": 30, "depth_cm": 7, "confidence_pct": 90}
    )
    assert message.fields["x_m"] == struct.unpack(">f", struct.pack(">f", 0.1))[0]
    assert message.fields["y_m"] == 2.5


def test_raw_float64_fields_come_back_as_float32(kb):
    fields = {"x_m": 0.1, "y_m": 2.5, "diameter_cm": 30, "depth_cm": 7, "confidence_pct": 90}
    decoded = semcomm_service.decode(semcomm_service.encode(fields, kb, "PotholeDetection"), kb)
    assert decoded.fields["x_m"] != 0.1
    assert decoded.fields == semcomm_service.compose_message(kb, "PotholeDetection", fields).fields


@pytest.mark.parametrize(
    "fields, field",
    [
        ({"material": "asphalt", "friction_level": 3}, "unevenness_level"),
        ({**ROAD, "colour": "red"}, "colour"),
        ({**ROAD, "friction_level": 256}, "friction_level"),
        ({**ROAD, "friction_level": -1}, "friction_level"),
        ({**ROAD, "friction_level": 2.5}, "friction_level"),
        ({**ROAD, "friction_level": True}, "friction_level"),
        ({**ROAD, "material": "marble"}, "material"),
    ],
)
def test_non_conforming_fields(kb, fields, field):
    with pytest.raises(SchemaViolation) as excinfo:
        semcomm_service.encode(fields, kb, "RoadQuality")
    assert excinfo.value.field == field


def test_non_finite_and_bool_fields(kb):
    fault = {"fault_id": 1, "x_m": 1.0, "y_m": 2.0, "pass_time_ms": 10.0, "thermal_anomaly": False}
    with pytest.raises(SchemaViolation):
        semcomm_service.encode({**fault, "x_m": math.nan}, kb, "FaultReport")
    with pytest.raises(SchemaViolation):
        semcomm_service.encode({**fault, "thermal_anomaly": 1}, kb, "FaultReport")


def test_unknown_kind(kb):
    with pytest.raises(SchemaViolation):
        semcomm_service.encode(ROAD, kb, "Weather")


def test_encode_message_checks_the_knowledge_base(kb, kb_v2):
    message = semcomm_service.compose_message(kb, "RoadQuality", ROAD)
    with pytest.raises(KnowledgeBaseMismatch):
        semcomm_service.encode_message(message, kb_v2)


def test_malformed_payloads(kb):
    payload = semcomm_service.encode(ROAD, kb, "RoadQuality")
    with pytest.raises(MalformedPayload):
        semcomm_service.decode(payload[:5], kb)
    with pytest.raises(MalformedPayload):
        semcomm_service.decode(payload[:-1], kb)
    with pytest.raises(MalformedPayload):
        semcomm_service.decode(payload + b"\x00", kb)
    with pytest.raises(MalformedPayload):
        semcomm_service.decode(HEADER.pack(0x5357, 1, 99) + bytes(3), kb)
    with pytest.raises(MalformedPayload):
        semcomm_service.decode(payload[:8] + bytes([9, 3, 1]), kb)


def test_bad_bool_and_nan_on_the_wire(kb):
    fault = {"fault_id": 1, "x_m": 1.0, "y_m": 2.0, "pass_time_ms": 10.0, "thermal_anomaly": True}
    payload = semcomm_service.encode(fault, kb, "FaultReport")
    with pytest.raises(MalformedPayload):
        semcomm_service.decode(payload[:-1] + b"\x02", kb)
    nan_x = payload[:12] + struct.pack(">f", math.nan) + payload[16:]
    with pytest.raises(MalformedPayload):
        semcomm_service.decode(nan_x, kb)


def test_registry_versions_move_forward(kb, kb_v2):
    registry = semcomm_service.KnowledgeBaseRegistry([kb])
    assert registry.publish(kb) == kb
    registry.publish(kb_v2)
    assert registry.latest(kb.kb_id) == kb_v2
    assert registry.lookup(kb.kb_id, 1) == kb
    with pytest.raises(KnowledgeBaseMismatch):
        registry.publish(kb.model_copy(update={"entries": {}}))
    with pytest.raises(KnowledgeBaseMismatch):
        registry.lookup(kb.kb_id, 3)
    with pytest.raises(KnowledgeBaseMismatch):
        registry.latest(0x1234)


def test_registry_rejects_older_versions(kb, kb_v2):
    registry = semcomm_service.KnowledgeBaseRegistry([kb_v2])
    with pytest.raises(KnowledgeBaseMismatch):
        registry.publish(kb)


def test_registry_decodes_with_the_matching_version(kb, kb_v2):
    registry = semcomm_service.KnowledgeBaseRegistry([kb, kb_v2])
    payload = semcomm_service.encode(ROAD, kb_v2, "RoadQuality")
    decoded = registry.decode(payload, source_drone="d03")
    assert decoded.kb_version == 2
    assert decoded.fields == ROAD
    assert decoded.source_drone == "d03"


def test_descriptor_validation():
    with pytest.raises(ValidationError):
        FieldDescriptor(name="x", semantic_type=FieldTypeEnum.real, width_bytes=2)
    with pytest.raises(ValidationError):
        FieldDescriptor(name="kind", semantic_type=FieldTypeEnum.choice, width_bytes=1)
    with pytest.raises(ValidationError):
        FieldDescriptor(name="n", semantic_type=FieldTypeEnum.unsigned, width_bytes=1, choices=("a",))
    with pytest.raises(ValidationError):
        KnowledgeBase(kb_id=1, version=1, entries={"A": MessageSchema(code=1), "B": MessageSchema(code=1)})


def test_raw_bandwidth_of_1080p30():
    profile = VideoProfile(width_px=1920, height_px=1080, fps=30)
    assert semcomm_service.raw_bandwidth(profile) == 1_492_992_000
    assert semcomm_service.raw_bandwidth(profile.model_copy(update={"compression_factor": 0.5})) == 746_496_000


def test_semantic_bandwidth():
    assert semcomm_service.semantic_bandwidth(2048, 10) == 163_840
    with pytest.raises(ParameterError):
        semcomm_service.semantic_bandwidth(0, 10)


def test_reduction_is_clamped_at_zero():
    assert semcomm_service.reduction_ratio(1000.0, 400.0) == pytest.approx(0.6)
    assert semcomm_service.reduction_ratio(1000.0, 4000.0) == 0.0
    with pytest.raises(ParameterError):
        semcomm_service.reduction_ratio(0.0, 1.0)


def test_default_bandwidth_table():
    rows = semcomm_service.bandwidth_table()
    assert len(rows) == 2 * len(semcomm_service.DEFAULT_PROFILES)
    raw = [r for r in rows if r.mode == TransmissionModeEnum.raw]
    semantic = [r for r in rows if r.mode == TransmissionModeEnum.semantic]
    assert [r.profile for r in raw] == ["480p15", "480p30", "720p30", "1080p30", "1080p60", "2160p30"]
    assert [r.bits_per_second for r in raw] == sorted(r.bits_per_second for r in raw)
    for raw_row, semantic_row in zip(raw, semantic):
        assert semantic_row.bits_per_second < raw_row.bits_per_second
        assert semantic_row.reduction >= semcomm_service.CLAIMED_REDUCTION
        assert semantic_row.meets_claim
        assert not raw_row.meets_claim


def test_tiny_profile_does_not_meet_the_claim():
    rows = semcomm_service.bandwidth_table([VideoProfile(width_px=8, height_px=8, fps=1)], SemanticConfig())
    assert rows[1].reduction == 0.0
    assert not rows[1].meets_claim
    assert rows[1].profile == "8x8@1"


def test_empty_profile_list():
    with pytest.raises(ParameterError):
        semcomm_service.bandwidth_table([])


def test_parse_profile():
    assert semcomm_service.parse_profile("1080p30").name == "1080p30"
    custom = semcomm_service.parse_profile("320x240@12.5")
    assert (custom.width_px, custom.height_px, custom.fps) == (320, 240, 12.5)
    with pytest.raises(ParameterError):
        semcomm_service.parse_profile("huge")
