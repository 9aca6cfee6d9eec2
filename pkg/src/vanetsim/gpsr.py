"""Greedy Perimeter Stateless Routing.

Nodes beacon their position; each keeps a location table of neighbors heard
within the staleness timeout. Packets move greedily toward the destination's
position and fall back to right-hand-rule face traversal of a planarized
(Gabriel or RNG) neighbor graph at local maxima.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .engine import uniform
from .geometry import (NeighborView, Position, bearing, ccw_first, gabriel_mask, rng_mask,
                       segment_intersection)
from .packets import DropReason, Frame, Packet
from .routing import RoutingBase


class Mode(str, Enum):
    GREEDY = "GREEDY"
    PERIMETER = "PERIMETER"


@dataclass
class GpsrConfig:
    beacon_interval: float = 1.0
    beacon_jitter: float = 0.25
    timeout: float = 3.0
    planarization: str = "GG"
    piggyback: bool = True
    beacons: bool = True
    ttl: int = 128
    reroute_on_failure: bool = False
    beacon_size: int = 28
    header_size: int = 36


@dataclass(frozen=True, slots=True)
class GpsrBeacon:
    sender: int
    pos: Position


@dataclass(slots=True)
class GpsrHeader:
    dest: int
    dest_pos: Position
    mode: Mode = Mode.GREEDY
    lp: Position | None = None
    face_entry: Position | None = None
    first_edge: tuple[int, int] | None = None
    prev_hop: int | None = None
    prev_pos: Position | None = None
    sender_pos: Position | None = None
    retry_from: "GpsrHeader | None" = None

    def copy(self) -> "GpsrHeader":
        """Field copy without ``retry_from`` (cheaper than ``dataclasses.replace``)."""
        return GpsrHeader(self.dest, self.dest_pos, self.mode, self.lp, self.face_entry,
                          self.first_edge, self.prev_hop, self.prev_pos, self.sender_pos)


class Gpsr(RoutingBase):
    name = "GPSR"

    def __init__(self, sim, channel, ledger, config: GpsrConfig | None = None):
        super().__init__(sim, channel, ledger)
        self.cfg = config or GpsrConfig()
        if self.cfg.planarization.upper() not in ("GG", "RNG"):
            raise ValueError(f"planarization must be GG or RNG, got {self.cfg.planarization!r}")
        n = self.n
        self.heard = np.full((n, n), -np.inf)
        self.tab_x = np.zeros((n, n))
        self.tab_y = np.zeros((n, n))
        self.rng = sim.stream("beacon")
        # per-packet hop log when enabled: (node, mode, next hop, (lp, face_entry) or None)
        self.paths: dict[int, list[tuple]] | None = None
        self.beacon_log: dict[int, list[float]] | None = None
        self.perimeter_entries = 0
        if self.cfg.beacons:
            for i in range(n):
                sim.schedule(sim.now + uniform(self.rng, 0.0, self.cfg.beacon_interval),
                             self.beacon_tick, i)

    # -- location table ----------------------------------------------------

    def beacon_tick(self, node: int) -> None:
        cfg = self.cfg
        now = self.sim.now
        pos = Position(*self.channel.mobility.position(node, now))
        if self.beacon_log is not None:
            self.beacon_log.setdefault(node, []).append(now)
        self.channel.broadcast(node, GpsrBeacon(node, pos), cfg.beacon_size)
        gap = cfg.beacon_interval + uniform(self.rng, -cfg.beacon_jitter, cfg.beacon_jitter)
        self.sim.schedule(now + gap, self.beacon_tick, node)

    def receive_broadcast(self, frame: Frame, receivers: np.ndarray) -> None:
        b = frame.payload
        if type(b) is GpsrBeacon:
            self.heard[receivers, b.sender] = self.sim.now
            self.tab_x[receivers, b.sender] = b.pos[0]
            self.tab_y[receivers, b.sender] = b.pos[1]
        else:
            super().receive_broadcast(frame, receivers)

    def learn(self, node: int, other: int, pos, t: float | None = None) -> None:
        self.heard[node, other] = self.sim.now if t is None else t
        self.tab_x[node, other] = pos[0]
        self.tab_y[node, other] = pos[1]

    def forget(self, node: int, other: int) -> None:
        self.heard[node, other] = -np.inf

    def prime_tables(self) -> None:
        """Fill every table with exact current neighbor positions."""
        now = self.sim.now
        xs, ys = self.channel.mobility.positions(now)
        for i in range(self.n):
            nb = self.channel.neighbor_array(i, now)
            self.heard[i, nb] = now
            self.tab_x[i, nb] = xs[nb]
            self.tab_y[i, nb] = ys[nb]

    def prune_stale(self, node: int, now: float | None = None) -> list[int]:
        now = self.sim.now if now is None else now
        row = self.heard[node]
        stale = np.flatnonzero(np.isfinite(row) & (now - row > self.cfg.timeout))
        row[stale] = -np.inf
        return stale.tolist()

    def live_neighbors(self, node: int) -> np.ndarray:
        return np.flatnonzero(self.sim.now - self.heard[node] <= self.cfg.timeout)

    def table(self, node: int) -> dict[int, tuple[Position, float]]:
        ids = self.live_neighbors(node)
        return {int(i): (Position(float(self.tab_x[node, i]), float(self.tab_y[node, i])),
                         float(self.heard[node, i])) for i in ids}

    def planar_view(self, node: int, planarization: str | None = None,
                    live: np.ndarray | None = None) -> NeighborView:
        kind = (planarization or self.cfg.planarization).upper()
        ids = self.live_neighbors(node) if live is None else live
        self_pos = Position(*self.channel.mobility.position(node, self.sim.now))
        if len(ids) == 0:
            return NeighborView(node, self_pos, [])
        pts = np.column_stack((self.tab_x[node, ids], self.tab_y[node, ids]))
        keep = (gabriel_mask if kind == "GG" else rng_mask)(self_pos, pts)
        return NeighborView(node, self_pos, [(int(i), Position(float(p[0]), float(p[1])))
                                             for i, p, k in zip(ids, pts, keep) if k])

    # -- forwarding decisions ----------------------------------------------

    def greedy_next(self, node: int, header: GpsrHeader, self_pos=None,
                    live: np.ndarray | None = None) -> int | None:
        """Live neighbor nearest the destination, if strictly nearer than ``node``."""
        if self_pos is None:
            self_pos = self.channel.mobility.position(node, self.sim.now)
        ids = self.live_neighbors(node) if live is None else live
        if len(ids) == 0:
            return None
        dx, dy = header.dest_pos
        d2 = (self.tab_x[node, ids] - dx) ** 2 + (self.tab_y[node, ids] - dy) ** 2
        k = int(np.argmin(d2))
        own = (self_pos[0] - dx) ** 2 + (self_pos[1] - dy) ** 2
        return int(ids[k]) if d2[k] < own else None

    def enter_perimeter(self, node: int, header: GpsrHeader, self_pos,
                        view: NeighborView) -> int | None:
        if not view.neighbors:
            return None
        header.mode = Mode.PERIMETER
        header.lp = Position(*self_pos)
        header.face_entry = Position(*self_pos)
        nh = ccw_first(self_pos, bearing(self_pos, header.dest_pos), view.neighbors)
        header.first_edge = (node, nh)
        self.perimeter_entries += 1
        return nh

    def perimeter_next(self, node: int, header: GpsrHeader, self_pos,
                       view: NeighborView) -> int | DropReason:
        """Right-hand-rule step with face changes; returns a hop or a drop reason."""
        cands = view.neighbors
        if not cands:
            return DropReason.NO_NEIGHBOR
        pos_of = dict(cands)
        prev_pos = header.prev_pos
        if prev_pos is None:
            prev_pos = header.lp
        nh = ccw_first(self_pos, bearing(self_pos, prev_pos), cands)
        dest = header.dest_pos
        changed = False
        for _ in range(len(cands)):
            hit = segment_intersection(self_pos, pos_of[nh], header.lp, dest)
            if hit is None or _dist(hit, dest) >= _dist(header.face_entry, dest):
                break
            header.face_entry = hit
            nh = ccw_first(self_pos, bearing(self_pos, pos_of[nh]), cands)
            header.first_edge = (node, nh)
            changed = True
        if not changed and header.first_edge == (node, nh):
            return DropReason.DEST_UNREACHABLE
        return nh

    # -- packet handling ---------------------------------------------------

    def originate(self, node: int, pkt: Packet) -> None:
        dest_pos = Position(*self.channel.mobility.position(pkt.dst, self.sim.now))
        pkt.header = GpsrHeader(pkt.dst, dest_pos)
        if self.paths is not None:
            self.paths[pkt.pkt_id] = []
        self.forward(node, pkt)

    def receive(self, node: int, frame: Frame) -> None:
        pkt = frame.payload
        if type(pkt) is not Packet:
            return
        pkt.hops += 1
        h = pkt.header
        h.prev_hop = frame.src
        h.prev_pos = h.sender_pos
        if self.cfg.piggyback and h.sender_pos is not None:
            self.learn(node, frame.src, h.sender_pos)
        self.forward(node, pkt)

    def forward(self, node: int, pkt: Packet) -> None:
        if pkt.dst == node:
            if self.paths is not None:
                self.paths[pkt.pkt_id].append((node, None, None, None))
            self.deliver(node, pkt)
            return
        if pkt.hops >= self.cfg.ttl:
            self.drop(node, pkt, DropReason.TTL_EXPIRED)
            return
        now = self.sim.now
        incoming = pkt.header
        h = incoming.copy()
        self_pos = self.channel.mobility.position(node, now)
        live = self.live_neighbors(node)
        if h.mode is Mode.PERIMETER and _dist(self_pos, h.dest_pos) < _dist(h.lp, h.dest_pos):
            h.mode = Mode.GREEDY
            h.lp = h.face_entry = h.first_edge = None
        if pkt.dst in live:
            nh = pkt.dst
        elif h.mode is Mode.GREEDY:
            nh = self.greedy_next(node, h, self_pos, live)
            if nh is None:
                view = self.planar_view(node, live=live)
                nh = self.enter_perimeter(node, h, self_pos, view)
                if nh is None:
                    self.drop(node, pkt, DropReason.NO_NEIGHBOR)
                    return
        else:
            res = self.perimeter_next(node, h, self_pos, self.planar_view(node, live=live))
            if isinstance(res, DropReason):
                self.drop(node, pkt, res)
                return
            nh = res
        if self.paths is not None:
            episode = (h.lp, h.face_entry) if h.mode is Mode.PERIMETER else None
            self.paths[pkt.pkt_id].append((node, h.mode, nh, episode))
        h.sender_pos = Position(*self_pos)
        h.retry_from = incoming
        pkt.header = h
        self.channel.send(node, nh, pkt, pkt.size + self.cfg.header_size)

    def tx_failed(self, node: int, frame: Frame) -> None:
        """Link-layer failure: forget the neighbor; drop the packet unless
        re-routing is enabled."""
        self.forget(node, frame.dst)
        pkt = frame.payload
        if type(pkt) is not Packet:
            return
        if not self.cfg.reroute_on_failure:
            self.drop(node, pkt, DropReason.LINK_BREAK)
            return
        if self.paths is not None and self.paths.get(pkt.pkt_id):
            self.paths[pkt.pkt_id].pop()
        pkt.header = pkt.header.retry_from
        self.forward(node, pkt)


def _dist(a, b) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])
