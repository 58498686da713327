"""Structured documents: versioned YAML with a ``schema`` header.

Every document looks like::

    schema: swarmnet/<kind>
    schema_version: 1
    <kind>:
      ...

Readers keep the YAML node tree so that errors can point at a line.
"""
import hashlib
import json
from dataclasses import dataclass
from typing import Any, Optional, Sequence, Type, TypeVar

import yaml
from pydantic import BaseModel, ValidationError

from swarmnet.utils.errors import DocumentError

SCHEMA_PREFIX = "swarmnet/"

ModelT = TypeVar("ModelT", bound=BaseModel)


@dataclass(frozen=True)
class Document:
    kind: str
    version: int
    body: Any
    node: Optional[yaml.Node]


def dump_document(kind: str, body: Any, version: int = 1) -> str:
    payload = {"schema": f"{SCHEMA_PREFIX}{kind}", "schema_version": version, kind: body}
    return yaml.safe_dump(payload, sort_keys=False, allow_unicode=True, default_flow_style=None, width=100)


def read_document(text: str, expected_kind: Optional[str] = None, max_version: Optional[int] = None) -> Document:
    try:
        node = yaml.compose(text, Loader=yaml.SafeLoader)
        data = yaml.safe_load(text)
    except yaml.MarkedYAMLError as exc:
        line = exc.problem_mark.line + 1 if exc.problem_mark is not None else None
        raise DocumentError(f"malformed document: {exc.problem}", line=line) from exc
    except yaml.YAMLError as exc:
        raise DocumentError(f"malformed document: {exc}") from exc

    if not isinstance(data, dict):
        raise DocumentError("document must be a mapping with a schema header", line=1)
    schema = data.get("schema")
    if not isinstance(schema, str) or not schema.startswith(SCHEMA_PREFIX):
        raise DocumentError(
            f"schema header must look like '{SCHEMA_PREFIX}<kind>'",
            field="schema",
            line=locate(node, ["schema"]),
        )
    kind = schema[len(SCHEMA_PREFIX):]
    if expected_kind is not None and kind != expected_kind:
        raise DocumentError(
            f"expected a '{expected_kind}' document, got '{kind}'",
            field="schema",
            line=locate(node, ["schema"]),
        )
    version = data.get("schema_version")
    if not isinstance(version, int) or isinstance(version, bool) or version < 1:
        raise DocumentError("schema_version must be a positive integer", field="schema_version", line=locate(node, ["schema_version"]))
    if max_version is not None and version > max_version:
        raise DocumentError(
            f"schema_version {version} is newer than supported version {max_version}",
            field="schema_version",
            line=locate(node, ["schema_version"]),
        )
    if kind not in data:
        raise DocumentError("document body is missing", field=kind, line=locate(node, []))
    return Document(kind=kind, version=version, body=data[kind], node=node)


def locate(node: Optional[yaml.Node], path: Sequence[Any]) -> Optional[int]:
    """1-based line of the deepest node reachable along ``path``."""
    if node is None:
        return None
    current = node
    for step in path:
        child = None
        if isinstance(current, yaml.MappingNode):
            for key, value in current.value:
                if key.value == str(step):
                    child = value
                    break
        elif isinstance(current, yaml.SequenceNode) and isinstance(step, int):
            if 0 <= step < len(current.value):
                child = current.value[step]
        if child is None:
            break
        current = child
    return current.start_mark.line + 1


def load_model(document: Document, model: Type[ModelT]) -> ModelT:
    """Validate the body of ``document`` into ``model`` with field/line error loci."""
    if not isinstance(document.body, dict):
        raise DocumentError("document body must be a mapping", field=document.kind, line=locate(document.node, [document.kind]))
    try:
        return model.model_validate(document.body)
    except ValidationError as exc:
        raise as_document_error(exc, document) from exc


def as_document_error(exc: ValidationError, document: Document) -> DocumentError:
    first = exc.errors()[0]
    loc = [part for part in first["loc"] if not isinstance(part, str) or not part.startswith("function-")]
    field = ".".join(str(part) for part in loc) or document.kind
    if first["type"] == "enum":
        message = f"unknown value {first['input']!r}; accepted values: {first['ctx']['expected']}"
    elif first["type"] == "missing":
        message = "required field is missing"
    else:
        message = first["msg"]
    return DocumentError(message, field=field, line=locate(document.node, [document.kind, *loc]))


def content_hash(data: Any) -> str:
    """First 16 hex chars of BLAKE2b over canonical JSON (sorted keys, no whitespace)."""
    canonical = json.dumps(data, sort_keys=True, separators=(",", ":"), ensure_ascii=False)
    return hashlib.blake2b(canonical.encode("utf-8"), digest_size=8).hexdigest()
