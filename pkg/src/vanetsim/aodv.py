"""Ad-hoc On-demand Distance Vector routing."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .packets import DropReason, Frame, Packet
from .routing import RoutingBase, SeenCache


@dataclass
class AodvConfig:
    route_lifetime: float = 10.0
    seen_expiry: float = 3.0
    rreq_retry: float = 1.0
    max_retries: int = 2
    buffer_capacity: int = 64
    rreq_size: int = 48
    rrep_size: int = 44
    rerr_size: int = 32


@dataclass(slots=True)
class AodvRouteEntry:
    dest: int
    next_hop: int
    hop_count: int
    dest_seq: int
    expires_at: float
    precursors: set = field(default_factory=set)
    valid: bool = True


@dataclass(frozen=True, slots=True)
class Rreq:
    src: int
    src_seq: int
    broadcast_id: int
    dest: int
    dest_seq_known: int
    hop_count: int


@dataclass(frozen=True, slots=True)
class Rrep:
    dest: int
    dest_seq: int
    hop_count: int
    src: int
    lifetime: float


@dataclass(frozen=True, slots=True)
class Rerr:
    broken_dest: int
    detecting_node: int


class _Discovery:
    __slots__ = ("retries",)

    def __init__(self):
        self.retries = 0


class Aodv(RoutingBase):
    name = "AODV"

    def __init__(self, sim, channel, ledger, config: AodvConfig | None = None):
        super().__init__(sim, channel, ledger)
        self.cfg = config or AodvConfig()
        n = self.n
        self.seq = [0] * n
        self.broadcast_id = [0] * n
        self.routes: list[dict[int, AodvRouteEntry]] = [{} for _ in range(n)]
        self.pending: list[dict[int, deque]] = [{} for _ in range(n)]
        self.discovery: list[dict[int, _Discovery]] = [{} for _ in range(n)]
        self.seen = SeenCache(n, self.cfg.seen_expiry)
        self.rreq_sent = 0
        self.rreq_tx: dict[tuple[int, int], list[int]] = {}
        self.track_floods = False

    # -- route table -------------------------------------------------------

    def usable(self, node: int, dest: int) -> AodvRouteEntry | None:
        e = self.routes[node].get(dest)
        if e is not None and e.valid and self.sim.now < e.expires_at:
            return e
        return None

    def update_route(self, node: int, dest: int, next_hop: int, hop_count: int,
                     dest_seq: int, lifetime: float | None = None) -> bool:
        """Install or refresh a route subject to sequence-number freshness.

        Returns True if the entry was created or replaced.
        """
        now = self.sim.now
        expires = now + (self.cfg.route_lifetime if lifetime is None else lifetime)
        table = self.routes[node]
        e = table.get(dest)
        if e is None:
            table[dest] = AodvRouteEntry(dest, next_hop, hop_count, dest_seq, expires)
            return True
        live = e.valid and now < e.expires_at
        if live:
            better = dest_seq > e.dest_seq or (dest_seq == e.dest_seq and hop_count < e.hop_count)
        else:
            better = dest_seq >= e.dest_seq
        if not better:
            if live and dest_seq == e.dest_seq and next_hop == e.next_hop and hop_count == e.hop_count:
                e.expires_at = max(e.expires_at, expires)
            return False
        e.next_hop = next_hop
        e.hop_count = hop_count
        e.dest_seq = dest_seq
        e.expires_at = expires
        e.valid = True
        return True

    def _invalidate(self, e: AodvRouteEntry) -> None:
        e.valid = False
        e.dest_seq += 1

    # -- origination -------------------------------------------------------

    def originate(self, node: int, pkt: Packet) -> None:
        self.send(node, pkt)

    def send(self, node: int, pkt: Packet) -> None:
        e = self.usable(node, pkt.dst)
        if e is not None:
            self._forward(node, pkt, e)
            return
        self._buffer(node, pkt)
        if pkt.dst not in self.discovery[node]:
            self.discovery[node][pkt.dst] = d = _Discovery()
            self._send_rreq(node, pkt.dst, d)

    def _buffer(self, node: int, pkt: Packet) -> None:
        q = self.pending[node].get(pkt.dst)
        if q is None:
            q = self.pending[node][pkt.dst] = deque()
        if len(q) >= self.cfg.buffer_capacity:
            self.drop(node, q.popleft(), DropReason.NO_ROUTE)
        q.append(pkt)

    def _send_rreq(self, node: int, dest: int, d: _Discovery) -> None:
        self.seq[node] += 1
        self.broadcast_id[node] += 1
        known = self.routes[node].get(dest)
        rreq = Rreq(node, self.seq[node], self.broadcast_id[node], dest,
                    known.dest_seq if known is not None else 0, 0)
        self.seen.mark(node, (node, rreq.broadcast_id), self.sim.now)
        self.rreq_sent += 1
        self._broadcast_rreq(node, rreq)
        self.sim.schedule(self.sim.now + self.cfg.rreq_retry, self._retry, node, dest, d)

    def _broadcast_rreq(self, node: int, rreq: Rreq) -> None:
        if self.track_floods:
            self.rreq_tx.setdefault((rreq.src, rreq.broadcast_id), []).append(node)
        self.channel.broadcast(node, rreq, self.cfg.rreq_size)

    def _retry(self, node: int, dest: int, d: _Discovery) -> None:
        if self.discovery[node].get(dest) is not d:
            return
        if self.usable(node, dest) is not None or not self.pending[node].get(dest):
            del self.discovery[node][dest]
            self._flush(node, dest)
            return
        if d.retries < self.cfg.max_retries:
            d.retries += 1
            self._send_rreq(node, dest, d)
            return
        del self.discovery[node][dest]
        for pkt in self.pending[node].pop(dest, ()):
            self.drop(node, pkt, DropReason.NO_ROUTE)

    def _flush(self, node: int, dest: int) -> None:
        q = self.pending[node].pop(dest, None)
        if not q:
            return
        self.discovery[node].pop(dest, None)
        while q:
            pkt = q.popleft()
            e = self.usable(node, dest)
            if e is None:
                self.send(node, pkt)
            else:
                self._forward(node, pkt, e)

    def _forward(self, node: int, pkt: Packet, e: AodvRouteEntry) -> None:
        expires = self.sim.now + self.cfg.route_lifetime
        if expires > e.expires_at:
            e.expires_at = expires
        self.channel.send(node, e.next_hop, pkt, pkt.size)

    # -- reception ---------------------------------------------------------

    def receive(self, node: int, frame: Frame) -> None:
        payload = frame.payload
        if type(payload) is Packet:
            payload.hops += 1
            if payload.dst == node:
                self.deliver(node, payload)
                return
            e = self.usable(node, payload.dst)
            if e is None:
                self.drop(node, payload, DropReason.NO_ROUTE)
                self.channel.send(node, frame.src, Rerr(payload.dst, node), self.cfg.rerr_size)
                return
            e.precursors.add(frame.src)
            self._forward(node, payload, e)
        elif type(payload) is Rrep:
            self.handle_rrep(node, payload, frame.src)
        elif type(payload) is Rerr:
            self.handle_rerr(node, payload, frame.src)
        elif type(payload) is Rreq:
            self.handle_rreq(node, payload, frame.src)

    def receive_broadcast(self, frame: Frame, receivers: np.ndarray) -> None:
        rreq = frame.payload
        if type(rreq) is not Rreq:
            for node in receivers.tolist():
                self.receive(node, frame)
            return
        fresh = self.seen.unseen(receivers, (rreq.src, rreq.broadcast_id), self.sim.now)
        for node in fresh.tolist():
            self.handle_rreq(node, rreq, frame.src)

    def handle_rreq(self, node: int, rreq: Rreq, sender: int) -> None:
        now = self.sim.now
        key = (rreq.src, rreq.broadcast_id)
        if self.seen.has(node, key, now):
            return
        self.seen.mark(node, key, now)
        self.update_route(node, rreq.src, sender, rreq.hop_count + 1, rreq.src_seq)
        cfg = self.cfg
        if node == rreq.dest:
            self.seq[node] = max(self.seq[node], rreq.dest_seq_known) + 1
            rrep = Rrep(node, self.seq[node], 0, rreq.src, cfg.route_lifetime)
            self.channel.send(node, sender, rrep, cfg.rrep_size)
            return
        e = self.usable(node, rreq.dest)
        if e is not None and e.dest_seq >= rreq.dest_seq_known and e.next_hop != sender:
            e.precursors.add(sender)
            rev = self.routes[node][rreq.src]
            rev.precursors.add(e.next_hop)
            rrep = Rrep(rreq.dest, e.dest_seq, e.hop_count, rreq.src, e.expires_at - now)
            self.channel.send(node, sender, rrep, cfg.rrep_size)
            return
        self._broadcast_rreq(node, Rreq(rreq.src, rreq.src_seq, rreq.broadcast_id, rreq.dest,
                                        rreq.dest_seq_known, rreq.hop_count + 1))

    def handle_rrep(self, node: int, rrep: Rrep, sender: int) -> None:
        updated = self.update_route(node, rrep.dest, sender, rrep.hop_count + 1,
                                    rrep.dest_seq, rrep.lifetime)
        if node == rrep.src:
            if self.usable(node, rrep.dest) is not None:
                self._flush(node, rrep.dest)
            return
        rev = self.usable(node, rrep.src)
        if rev is None:
            self.drop_control("Rrep", DropReason.STALE_REVERSE)
            return
        if not updated:
            return
        fwd = self.routes[node][rrep.dest]
        fwd.precursors.add(rev.next_hop)
        rev.precursors.add(sender)
        self.channel.send(node, rev.next_hop,
                          Rrep(rrep.dest, rrep.dest_seq, rrep.hop_count + 1, rrep.src, rrep.lifetime),
                          self.cfg.rrep_size)

    def handle_rerr(self, node: int, rerr: Rerr, sender: int) -> None:
        e = self.routes[node].get(rerr.broken_dest)
        if e is None or not e.valid or e.next_hop != sender:
            return
        self._invalidate(e)
        for p in sorted(e.precursors):
            if p != sender:
                self.channel.send(node, p, Rerr(e.dest, rerr.detecting_node), self.cfg.rerr_size)
        if self.pending[node].get(e.dest) and e.dest not in self.discovery[node]:
            self.discovery[node][e.dest] = d = _Discovery()
            self._send_rreq(node, e.dest, d)

    def tx_failed(self, node: int, frame: Frame) -> None:
        self.handle_link_break(node, frame.dst, frame)

    def handle_link_break(self, node: int, next_hop: int, frame: Frame | None) -> list[int]:
        """Invalidate routes through ``next_hop`` and notify their precursors.

        Returns the destinations whose routes were invalidated.
        """
        if frame is not None:
            payload = frame.payload
            if type(payload) is Packet:
                self.drop(node, payload, DropReason.LINK_BREAK)
            else:
                self.drop_control(type(payload).__name__, DropReason.LINK_BREAK)
        broken = []
        for e in self.routes[node].values():
            if e.valid and e.next_hop == next_hop:
                self._invalidate(e)
                broken.append(e.dest)
                for p in sorted(e.precursors):
                    if p != next_hop:
                        self.channel.send(node, p, Rerr(e.dest, node), self.cfg.rerr_size)
        for dest in broken:
            if self.pending[node].get(dest) and dest not in self.discovery[node]:
                self.discovery[node][dest] = d = _Discovery()
                self._send_rreq(node, dest, d)
        return broken
