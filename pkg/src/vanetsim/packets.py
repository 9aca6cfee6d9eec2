"""Data packets, frames and drop reasons shared by the channel and routing agents."""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Any

BROADCAST = -1


class DropReason(str, Enum):
    QUEUE_OVERFLOW = "QUEUE_OVERFLOW"
    NO_ROUTE = "NO_ROUTE"
    LINK_BREAK = "LINK_BREAK"
    STALE_REVERSE = "STALE_REVERSE"
    DEST_UNREACHABLE = "DEST_UNREACHABLE"
    NO_NEIGHBOR = "NO_NEIGHBOR"
    MALFORMED = "MALFORMED"
    TTL_EXPIRED = "TTL_EXPIRED"

    def __str__(self) -> str:
        return self.value


@dataclass(slots=True)
class Packet:
    """An application data packet; ``header`` holds protocol routing state."""

    pkt_id: int
    flow_id: int
    src: int
    dst: int
    size: int
    created: float
    hops: int = 0
    header: Any = None


@dataclass(slots=True)
class Frame:
    src: int
    dst: int
    payload: Any
    size: int
    enqueue_time: float = 0.0

    @property
    def is_broadcast(self) -> bool:
        return self.dst == BROADCAST

    @property
    def is_data(self) -> bool:
        return isinstance(self.payload, Packet)
