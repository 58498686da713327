"""Comma-separated result files: UTF-8, header row, ``\\n`` line ends, shortest round-trip floats."""
import csv
import io
from typing import Any, Iterable, Mapping, Sequence, Union


def _field(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def to_csv(columns: Sequence[str], rows: Iterable[Union[Mapping[str, Any], Sequence[Any]]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        values = [row[c] for c in columns] if isinstance(row, Mapping) else list(row)
        writer.writerow([_field(v) for v in values])
    return buffer.getvalue()

