"""Shared plumbing for the routing agents."""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from .channel import RoutingAgent
from .packets import DropReason, Packet

if TYPE_CHECKING:
    from .channel import Channel
    from .engine import Simulator
    from .metrics import PacketLedger


class SeenCache:
    """Per-node "recently seen" sets for flooded requests.

    Stored transposed, one timestamp vector per request key, so a broadcast
    can discard every receiver that already handled the request in one
    vector operation. ``has(node, key)`` answers exactly what a per-node set
    with per-entry expiry would.
    """

    def __init__(self, n: int, expiry: float):
        self.n = n
        self.expiry = expiry
        self._seen: dict[tuple, np.ndarray] = {}
        self._last: dict[tuple, float] = {}
        self._marks = 0

    def _vec(self, key) -> np.ndarray:
        v = self._seen.get(key)
        if v is None:
            v = self._seen[key] = np.full(self.n, -np.inf)
        return v

    def has(self, node: int, key, now: float) -> bool:
        v = self._seen.get(key)
        return v is not None and now - v[node] <= self.expiry

    def mark(self, node: int, key, now: float) -> None:
        self._vec(key)[node] = now
        self._last[key] = now
        self._marks += 1
        if self._marks % 4096 == 0:
            self.purge(now)

    def unseen(self, nodes: np.ndarray, key, now: float) -> np.ndarray:
        v = self._seen.get(key)
        if v is None:
            return nodes
        return nodes[now - v[nodes] > self.expiry]

    def purge(self, now: float) -> None:
        stale = [k for k, t in self._last.items() if now - t > self.expiry]
        for k in stale:
            del self._seen[k]
            del self._last[k]

    def __len__(self) -> int:
        return len(self._seen)


class RoutingBase(RoutingAgent):
    name = "base"

    def __init__(self, sim: "Simulator", channel: "Channel", ledger: "PacketLedger"):
        self.sim = sim
        self.channel = channel
        self.ledger = ledger
        self.n = channel.mobility.n
        self.control_drops: dict[str, int] = {}
        channel.agent = self

    def originate(self, node: int, pkt: Packet) -> None:
        raise NotImplementedError

    def deliver(self, node: int, pkt: Packet) -> None:
        self.ledger.received(pkt.pkt_id, self.sim.now, pkt.hops)

    def drop(self, node: int, pkt: Packet, reason: DropReason) -> None:
        self.ledger.dropped(pkt.pkt_id, reason, pkt.hops, node)

    def drop_control(self, kind: str, reason: DropReason) -> None:
        key = f"{kind}:{reason.value}"
        self.control_drops[key] = self.control_drops.get(key, 0) + 1
