"""Priority queue of simulation events.

Events pop in ``(time_ms, kind order, subject, seq)`` order, which is total, so
a run replays identically no matter how handlers interleave their scheduling.
"""
import heapq
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

from swarmnet.models.enums import EventKindEnum
from swarmnet.utils.errors import ParameterError

KIND_ORDER: Dict[EventKindEnum, int] = {kind: rank for rank, kind in enumerate(EventKindEnum)}


@dataclass(frozen=True)
class Event:
    time_ms: float
    kind: EventKindEnum
    subject: str
    seq: int
    data: Dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def sort_key(self) -> Tuple[float, int, str, int]:
        return (self.time_ms, KIND_ORDER[self.kind], self.subject, self.seq)


class EventQueue:
    def __init__(self):
        self._heap: List[Tuple[Tuple[float, int, str, int], Event]] = []
        self._seq = 0
        self.now_ms = 0.0
        self.processed = 0

    def __len__(self) -> int:
        return len(self._heap)

    def schedule(self, time_ms: float, kind: EventKindEnum, subject: str, **data) -> Event:
        if time_ms < self.now_ms:
            raise ParameterError(f"cannot schedule {kind.value} at {time_ms} ms, before the current time {self.now_ms} ms")
        event = Event(time_ms=time_ms, kind=kind, subject=subject, seq=self._seq, data=data)
        self._seq += 1
        heapq.heappush(self._heap, (event.sort_key, event))
        return event

    def pop(self) -> Optional[Event]:
        if not self._heap:
            return None
        _, event = heapq.heappop(self._heap)
        self.now_ms = event.time_ms
        self.processed += 1
        return event
