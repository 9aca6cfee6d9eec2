"""Abstract wireless channel: closed unit-disk reach, per-node drop-tail FIFO,
serialization delay plus per-hop jitter, and link-failure feedback."""

from __future__ import annotations

import random
from collections import Counter, deque
from dataclasses import dataclass
from typing import TYPE_CHECKING, TextIO

import numpy as np

from .packets import BROADCAST, DropReason, Frame

if TYPE_CHECKING:
    from .engine import Simulator
    from .metrics import PacketLedger
    from .mobility import MobilityModel


@dataclass(frozen=True)
class ChannelParams:
    range: float = 250.0
    bitrate: float = 2e6
    jitter: float = 1e-3

    def __post_init__(self):
        if self.range <= 0:
            raise ValueError("range must be > 0")
        if self.bitrate <= 0:
            raise ValueError("bitrate must be > 0")
        if self.jitter < 0:
            raise ValueError("jitter must be >= 0")


class InterfaceQueue:
    """Drop-tail FIFO. The frame on the air stays at the head until it completes."""

    __slots__ = ("capacity", "pending", "busy", "max_occupancy")

    def __init__(self, capacity: int):
        self.capacity = capacity
        self.pending: deque[Frame] = deque()
        self.busy = False
        self.max_occupancy = 0

    def __len__(self) -> int:
        return len(self.pending)


class RoutingAgent:
    """Callbacks the channel invokes on the owning routing protocol."""

    def receive(self, node: int, frame: Frame) -> None:
        raise NotImplementedError

    def receive_broadcast(self, frame: Frame, receivers: np.ndarray) -> None:
        for node in receivers.tolist():
            self.receive(node, frame)

    def tx_failed(self, node: int, frame: Frame) -> None:
        pass


class Channel:
    def __init__(self, sim: "Simulator", mobility: "MobilityModel", params: ChannelParams,
                 queue_capacity: int, ledger: "PacketLedger | None" = None,
                 rng: random.Random | None = None, trace: TextIO | None = None):
        self.sim = sim
        self.mobility = mobility
        self.params = params
        self.ledger = ledger
        self.rng = rng if rng is not None else sim.stream("jitter")
        self.trace = trace
        self.agent: RoutingAgent | None = None
        self.queues = [InterfaceQueue(queue_capacity) for _ in range(mobility.n)]
        self._r2 = params.range * params.range
        self._bit_time = 8.0 / params.bitrate
        self.tx_count: Counter[str] = Counter()
        self.control_drops: Counter[str] = Counter()
        if ledger is not None and trace is not None:
            ledger.on_drop = self._trace_drop

    # -- tracing -----------------------------------------------------------

    def _trace(self, node: int, evt: str, pkt_id: int, reason: str = "-") -> None:
        self.trace.write(f"{self.sim.now:.6f} | {node} | EVT {evt} | {pkt_id} | {reason}\n")

    def _trace_drop(self, rec, node) -> None:
        self._trace(-1 if node is None else node, "DROP", rec.pkt_id, rec.drop_reason.value)

    # -- topology ----------------------------------------------------------

    def in_range(self, a: int, b: int, t: float | None = None) -> bool:
        t = self.sim.now if t is None else t
        ax, ay = self.mobility.position(a, t)
        bx, by = self.mobility.position(b, t)
        dx = ax - bx
        dy = ay - by
        return dx * dx + dy * dy <= self._r2

    def neighbor_array(self, node: int, t: float | None = None) -> np.ndarray:
        t = self.sim.now if t is None else t
        return self.mobility.neighbors_within(node, t, self._r2)

    def neighbors(self, node: int, t: float | None = None) -> list[int]:
        return self.neighbor_array(node, t).tolist()

    # -- queueing ----------------------------------------------------------

    def drop_frame(self, node: int, frame: Frame, reason: DropReason) -> None:
        payload = frame.payload
        if frame.is_data:
            self.ledger.dropped(payload.pkt_id, reason, payload.hops, node)
        else:
            self.control_drops[f"{type(payload).__name__}:{reason.value}"] += 1

    def enqueue(self, node: int, frame: Frame) -> bool:
        q = self.queues[node]
        if len(q.pending) >= q.capacity:
            self.drop_frame(node, frame, DropReason.QUEUE_OVERFLOW)
            return False
        frame.enqueue_time = self.sim.now
        q.pending.append(frame)
        if len(q.pending) > q.max_occupancy:
            q.max_occupancy = len(q.pending)
        if not q.busy:
            self._start(node, q)
        return True

    def send(self, node: int, dst: int, payload, size: int) -> bool:
        return self.enqueue(node, Frame(node, dst, payload, size))

    def broadcast(self, node: int, payload, size: int) -> bool:
        return self.enqueue(node, Frame(node, BROADCAST, payload, size))

    def tx_delay(self, size: int) -> float:
        return size * self._bit_time

    def _start(self, node: int, q: InterfaceQueue) -> None:
        frame = q.pending[0]
        q.busy = True
        delay = frame.size * self._bit_time
        if self.params.jitter > 0.0:
            delay += self.params.jitter * self.rng.random()
        if self.trace is not None and frame.is_data:
            self._trace(node, "SEND", frame.payload.pkt_id)
        self.sim.schedule(self.sim.now + delay, self._complete, node)

    def _complete(self, node: int) -> None:
        q = self.queues[node]
        frame = q.pending.popleft()
        q.busy = False
        self.tx_count[type(frame.payload).__name__] += 1
        agent = self.agent
        if frame.dst == BROADCAST:
            receivers = self.neighbor_array(node)
            if len(receivers):
                agent.receive_broadcast(frame, receivers)
        elif self.in_range(node, frame.dst):
            if self.trace is not None and frame.is_data:
                self._trace(frame.dst, "RECV", frame.payload.pkt_id)
            agent.receive(frame.dst, frame)
        else:
            if self.trace is not None and frame.is_data:
                self._trace(node, "TXFAIL", frame.payload.pkt_id, "OUT_OF_RANGE")
            agent.tx_failed(node, frame)
        if not q.busy and q.pending:
            self._start(node, q)
