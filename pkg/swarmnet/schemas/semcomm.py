from typing import Any, Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from swarmnet.models.enums import FieldTypeEnum, TransmissionModeEnum

# struct format per (type, width in bytes)
WIRE_FORMATS: Dict[Tuple[FieldTypeEnum, int], str] = {
    (FieldTypeEnum.unsigned, 1): "B",
    (FieldTypeEnum.unsigned, 2): "H",
    (FieldTypeEnum.unsigned, 4): "I",
    (FieldTypeEnum.unsigned, 8): "Q",
    (FieldTypeEnum.signed, 1): "b",
    (FieldTypeEnum.signed, 2): "h",
    (FieldTypeEnum.signed, 4): "i",
    (FieldTypeEnum.signed, 8): "q",
    (FieldTypeEnum.real, 4): "f",
    (FieldTypeEnum.real, 8): "d",
    (FieldTypeEnum.choice, 1): "B",
    (FieldTypeEnum.choice, 2): "H",
    (FieldTypeEnum.flag, 1): "?",
}


class FieldDescriptor(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = Field(..., min_length=1)
    semantic_type: FieldTypeEnum
    unit: str = ""
    width_bytes: int = Field(..., ge=1, le=8)
    choices: Tuple[str, ...] = ()

    @model_validator(mode="after")
    def _check_wire_format(self) -> "FieldDescriptor":
        if (self.semantic_type, self.width_bytes) not in WIRE_FORMATS:
            raise ValueError(f"{self.semantic_type.value} fields cannot be {self.width_bytes} bytes wide")
        if self.semantic_type == FieldTypeEnum.choice:
            if not self.choices:
                raise ValueError(f"enum field '{self.name}' needs choices")
            if len(set(self.choices)) != len(self.choices):
                raise ValueError(f"enum field '{self.name}' repeats a choice")
            if len(self.choices) > 1 << (8 * self.width_bytes):
                raise ValueError(f"enum field '{self.name}' has more choices than fit in {self.width_bytes} bytes")
        elif self.choices:
            raise ValueError(f"only enum fields take choices, '{self.name}' is {self.semantic_type.value}")
        return self

    @property
    def wire_format(self) -> str:
        return WIRE_FORMATS[(self.semantic_type, self.width_bytes)]


class MessageSchema(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    code: int = Field(..., ge=0, le=0xFFFF)
    fields: Tuple[FieldDescriptor, ...] = ()

    @model_validator(mode="after")
    def _unique_names(self) -> "MessageSchema":
        names = [f.name for f in self.fields]
        if len(set(names)) != len(names):
            raise ValueError("field names must be unique within a message kind")
        return self

    @property
    def payload_width(self) -> int:
        return sum(f.width_bytes for f in self.fields)


class KnowledgeBase(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    kb_id: int = Field(..., ge=0, le=0xFFFFFFFF)
    version: int = Field(..., ge=0, le=0xFFFF)
    entries: Dict[str, MessageSchema]

    @model_validator(mode="after")
    def _unique_codes(self) -> "KnowledgeBase":
        codes = [schema.code for schema in self.entries.values()]
        if len(set(codes)) != len(codes):
            raise ValueError("message kinds must have distinct codes")
        return self

    def kind_for_code(self, code: int) -> Optional[str]:
        for kind, schema in self.entries.items():
            if schema.code == code:
                return kind
        return None


class SemanticMessage(BaseModel):
    model_config = ConfigDict(frozen=True)

    kb_id: int
    kb_version: int
    message_kind: str
    fields: Dict[str, Any]
    source_drone: Optional[str] = None
    timestamp_ms: Optional[float] = None


class VideoProfile(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    name: str = ""
    width_px: int = Field(..., gt=0)
    height_px: int = Field(..., gt=0)
    fps: float = Field(..., gt=0)
    bits_per_pixel: float = Field(24.0, gt=0)
    compression_factor: float = Field(1.0, gt=0, le=1)

    @property
    def label(self) -> str:
        return self.name or f"{self.width_px}x{self.height_px}@{self.fps:g}"


class SemanticConfig(BaseModel):
    model_config = ConfigDict(frozen=True, extra="forbid")

    message_size_bytes: int = Field(2048, gt=0)
    messages_per_frame: float = Field(1.0, gt=0)


BANDWIDTH_COLUMNS = ("profile", "mode", "bits_per_second", "reduction", "meets_claim")


class BandwidthRow(BaseModel):
    model_config = ConfigDict(frozen=True)

    profile: str
    mode: TransmissionModeEnum
    bits_per_second: float
    reduction: float
    meets_claim: bool

    def as_record(self) -> List[Any]:
        return [self.profile, self.mode.value, self.bits_per_second, self.reduction, self.meets_claim]
