"""Constant-bit-rate flows."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import Callable

from .engine import Simulator, uniform
from .metrics import PacketLedger
from .packets import Packet


@dataclass(frozen=True)
class CbrFlow:
    flow_id: int
    src: int
    dst: int
    rate: float
    packet_size: int
    start: float
    stop: float

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError(f"flow {self.flow_id}: src == dst")
        if not self.start < self.stop:
            raise ValueError(f"flow {self.flow_id}: start must precede stop")
        if self.rate <= 0:
            raise ValueError(f"flow {self.flow_id}: rate must be > 0")

    @property
    def n_packets(self) -> int:
        # small guard so k/rate products that land exactly on stop are counted
        return math.floor((self.stop - self.start) * self.rate + 1e-9) + 1

    def emission_time(self, k: int) -> float:
        return self.start + k / self.rate


def build_flows(n_connections: int, n_nodes: int, rng: random.Random, rate: float = 4.0,
                packet_size: int = 512, start_window: tuple[float, float] = (0.0, 10.0),
                stop: float = 600.0) -> list[CbrFlow]:
    """Distinct ordered (src, dst) pairs drawn uniformly without replacement."""
    if n_connections < 1:
        raise ValueError("need at least one connection")
    n_pairs = n_nodes * (n_nodes - 1)
    if n_connections > n_pairs:
        raise ValueError(f"{n_connections} connections exceed the {n_pairs} ordered pairs "
                         f"available among {n_nodes} nodes")
    flows = []
    for fid, code in enumerate(rng.sample(range(n_pairs), n_connections)):
        src, k = divmod(code, n_nodes - 1)
        dst = k if k < src else k + 1
        start = uniform(rng, *start_window)
        flows.append(CbrFlow(fid, src, dst, rate, packet_size, start, stop))
    return flows


class CbrTraffic:
    """Schedules every flow's emissions and hands packets to ``originate``."""

    def __init__(self, sim: Simulator, flows: list[CbrFlow], ledger: PacketLedger,
                 originate: Callable[[int, Packet], None]):
        self.sim = sim
        self.flows = flows
        self.ledger = ledger
        self.originate = originate
        self.emitted = {f.flow_id: 0 for f in flows}
        for f in flows:
            sim.schedule(f.start, self.cbr_emit, f, 0)

    def cbr_emit(self, flow: CbrFlow, k: int) -> Packet:
        t = self.sim.now
        rec = self.ledger.register(flow.flow_id, flow.src, flow.dst, flow.packet_size, t)
        pkt = Packet(rec.pkt_id, flow.flow_id, flow.src, flow.dst, flow.packet_size, t)
        self.emitted[flow.flow_id] += 1
        if k + 1 < flow.n_packets:
            self.sim.schedule(flow.emission_time(k + 1), self.cbr_emit, flow, k + 1)
        self.originate(flow.src, pkt)
        return pkt
