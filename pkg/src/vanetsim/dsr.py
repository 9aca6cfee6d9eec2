"""Dynamic Source Routing with route records, route caches and hop-by-hop
failure truncation. Symmetric links only."""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from .packets import DropReason, Frame, Packet
from .routing import RoutingBase, SeenCache


@dataclass
class DsrConfig:
    cache_capacity: int = 64
    seen_expiry: float = 30.0
    buffer_capacity: int = 64
    rreq_retry: float = 1.0
    max_retries: int = 2
    base_size: int = 32
    per_hop_size: int = 4
    error_size: int = 32
    cache_from_replies: bool = True


@dataclass(frozen=True, slots=True)
class DsrRreq:
    src: int
    request_id: int
    dest: int
    route_record: tuple[int, ...]


@dataclass(frozen=True, slots=True)
class DsrRrep:
    route: tuple[int, ...]
    cursor: int  # index of the node the reply is travelling to


@dataclass(frozen=True, slots=True)
class DsrRouteError:
    detecting: int
    broken: tuple[int, int]
    path: tuple[int, ...]  # detecting node back to the packet source
    cursor: int


@dataclass(slots=True)
class SourceRouteHeader:
    route: tuple[int, ...]
    cursor: int  # index of the next hop; holder is route[cursor - 1]


class RouteCache:
    """Source routes learned by one node, each starting at that node."""

    def __init__(self, owner: int, capacity: int = 64):
        self.owner = owner
        self.capacity = capacity
        self.routes: list[tuple[int, ...]] = []

    def __len__(self) -> int:
        return len(self.routes)

    def __contains__(self, route) -> bool:
        return tuple(route) in self.routes

    def add(self, route) -> bool:
        route = tuple(route)
        if len(route) < 2 or route[0] != self.owner or len(set(route)) != len(route):
            return False
        if route in self.routes:
            return False
        self.routes.append(route)
        if len(self.routes) > self.capacity:
            self.routes.pop(0)
        return True

    def find(self, dest: int) -> tuple[int, ...] | None:
        """Shortest cached prefix ending at ``dest``; newest wins ties."""
        best = None
        for r in self.routes:
            try:
                i = r.index(dest, 1)
            except ValueError:
                continue
            if best is None or i + 1 <= len(best):
                best = r[: i + 1]
        return best

    def truncate(self, u: int, v: int) -> int:
        """Cut every route at the hop (u, v), keeping the prefix ending at u."""
        changed = 0
        kept: list[tuple[int, ...]] = []
        for r in self.routes:
            cut = None
            for i in range(len(r) - 1):
                if r[i] == u and r[i + 1] == v:
                    cut = i + 1
                    break
            if cut is not None:
                changed += 1
                r = r[:cut]
            # a shortened route may now equal one already kept
            if len(r) >= 2 and r not in kept:
                kept.append(r)
        self.routes = kept
        return changed


class Dsr(RoutingBase):
    name = "DSR"

    def __init__(self, sim, channel, ledger, config: DsrConfig | None = None):
        super().__init__(sim, channel, ledger)
        self.cfg = config or DsrConfig()
        n = self.n
        self.request_id = [0] * n
        self.cache = [RouteCache(i, self.cfg.cache_capacity) for i in range(n)]
        self.pending: list[dict[int, deque]] = [{} for _ in range(n)]
        self.discovery: list[dict[int, list]] = [{} for _ in range(n)]
        self.seen = SeenCache(n, self.cfg.seen_expiry)
        self.rreq_sent = 0
        self.replies_sent = 0
        self.rreq_tx: dict[tuple[int, int], list[int]] = {}
        self.track_floods = False

    def rreq_size(self, rreq: DsrRreq) -> int:
        return self.cfg.base_size + self.cfg.per_hop_size * len(rreq.route_record)

    def rrep_size(self, rrep: DsrRrep) -> int:
        return self.cfg.base_size + self.cfg.per_hop_size * len(rrep.route)

    # -- origination -------------------------------------------------------

    def originate(self, node: int, pkt: Packet) -> None:
        self.send(node, pkt)

    def send(self, node: int, pkt: Packet) -> None:
        route = self.cache[node].find(pkt.dst)
        if route is not None:
            self._send_on_route(node, pkt, route)
            return
        q = self.pending[node].get(pkt.dst)
        if q is None:
            q = self.pending[node][pkt.dst] = deque()
        if len(q) >= self.cfg.buffer_capacity:
            self.drop(node, q.popleft(), DropReason.NO_ROUTE)
        q.append(pkt)
        if pkt.dst not in self.discovery[node]:
            d = self.discovery[node][pkt.dst] = [0]
            self._send_rreq(node, pkt.dst, d)

    def _send_on_route(self, node: int, pkt: Packet, route: tuple[int, ...]) -> None:
        pkt.header = SourceRouteHeader(route, 1)
        size = pkt.size + self.cfg.per_hop_size * len(route)
        self.channel.send(node, route[1], pkt, size)

    def _send_rreq(self, node: int, dest: int, d: list) -> None:
        self.request_id[node] += 1
        rreq = DsrRreq(node, self.request_id[node], dest, (node,))
        self.rreq_sent += 1
        self._broadcast_rreq(node, rreq)
        self.sim.schedule(self.sim.now + self.cfg.rreq_retry, self._retry, node, dest, d)

    def _broadcast_rreq(self, node: int, rreq: DsrRreq) -> None:
        if self.track_floods:
            self.rreq_tx.setdefault((rreq.src, rreq.request_id), []).append(node)
        self.channel.broadcast(node, rreq, self.rreq_size(rreq))

    def _retry(self, node: int, dest: int, d: list) -> None:
        if self.discovery[node].get(dest) is not d:
            return
        if self.cache[node].find(dest) is not None or not self.pending[node].get(dest):
            self._flush(node, dest)
            return
        if d[0] < self.cfg.max_retries:
            d[0] += 1
            self._send_rreq(node, dest, d)
            return
        del self.discovery[node][dest]
        for pkt in self.pending[node].pop(dest, ()):
            self.drop(node, pkt, DropReason.NO_ROUTE)

    def _flush(self, node: int, dest: int) -> None:
        self.discovery[node].pop(dest, None)
        q = self.pending[node].pop(dest, None)
        while q:
            self.send(node, q.popleft())

    # -- reception ---------------------------------------------------------

    def receive(self, node: int, frame: Frame) -> None:
        payload = frame.payload
        kind = type(payload)
        if kind is Packet:
            payload.hops += 1
            self.forward_data(node, payload)
        elif kind is DsrRrep:
            self.handle_rrep(node, payload)
        elif kind is DsrRouteError:
            self.handle_route_error(node, payload)
        elif kind is DsrRreq:
            self.handle_rreq(node, payload, frame.src)

    def receive_broadcast(self, frame: Frame, receivers: np.ndarray) -> None:
        rreq = frame.payload
        if type(rreq) is not DsrRreq:
            for node in receivers.tolist():
                self.receive(node, frame)
            return
        fresh = self.seen.unseen(receivers, (rreq.src, rreq.request_id), self.sim.now)
        for node in fresh.tolist():
            self.handle_rreq(node, rreq, frame.src)

    def handle_rreq(self, node: int, rreq: DsrRreq, sender: int | None = None) -> str:
        """Apply the four request rules in order; returns which one fired."""
        now = self.sim.now
        key = (rreq.src, rreq.request_id)
        if self.seen.has(node, key, now):
            return "seen"
        if node in rreq.route_record:
            return "loop"
        self.seen.mark(node, key, now)
        if node == rreq.dest:
            route = rreq.route_record + (node,)
            rrep = DsrRrep(route, len(route) - 2)
            self.replies_sent += 1
            self.channel.send(node, route[-2], rrep, self.rrep_size(rrep))
            return "reply"
        fwd = DsrRreq(rreq.src, rreq.request_id, rreq.dest, rreq.route_record + (node,))
        self._broadcast_rreq(node, fwd)
        return "rebroadcast"

    def handle_rrep(self, node: int, rrep: DsrRrep) -> None:
        route = rrep.route
        if rrep.cursor == 0:
            if node != route[0]:
                self.drop_control("DsrRrep", DropReason.MALFORMED)
                return
            self.cache[node].add(route)
            dest = route[-1]
            if self.pending[node].get(dest):
                self._flush(node, dest)
            else:
                self.discovery[node].pop(dest, None)
            return
        if route[rrep.cursor] != node:
            self.drop_control("DsrRrep", DropReason.MALFORMED)
            return
        if self.cfg.cache_from_replies:
            self.cache[node].add(route[rrep.cursor:])
        nxt = DsrRrep(route, rrep.cursor - 1)
        self.channel.send(node, route[rrep.cursor - 1], nxt, self.rrep_size(nxt))

    def forward_data(self, node: int, pkt: Packet) -> None:
        hdr: SourceRouteHeader = pkt.header
        route = hdr.route
        if hdr.cursor >= len(route) or route[hdr.cursor] != node:
            self.drop(node, pkt, DropReason.MALFORMED)
            return
        hdr.cursor += 1
        if hdr.cursor == len(route):
            if pkt.dst != node:
                self.drop(node, pkt, DropReason.MALFORMED)
                return
            self.deliver(node, pkt)
            return
        size = pkt.size + self.cfg.per_hop_size * len(route)
        self.channel.send(node, route[hdr.cursor], pkt, size)

    # -- maintenance -------------------------------------------------------

    def tx_failed(self, node: int, frame: Frame) -> None:
        payload = frame.payload
        if type(payload) is Packet:
            self.handle_link_break(node, frame.dst, payload)
        else:
            self.drop_control(type(payload).__name__, DropReason.LINK_BREAK)

    def handle_link_break(self, node: int, next_hop: int, pkt: Packet | None) -> None:
        self.cache[node].truncate(node, next_hop)
        if pkt is None:
            return
        self.drop(node, pkt, DropReason.LINK_BREAK)
        route = pkt.header.route
        idx = route.index(node)
        if idx == 0:
            self._rediscover(node)
            return
        back = tuple(reversed(route[: idx + 1]))
        err = DsrRouteError(node, (node, next_hop), back, 1)
        self.channel.send(node, back[1], err, self.cfg.error_size)

    def handle_route_error(self, node: int, err: DsrRouteError) -> None:
        u, v = err.broken
        self.cache[node].truncate(u, v)
        if err.cursor == len(err.path) - 1:
            self._rediscover(node)
            return
        nxt = DsrRouteError(err.detecting, err.broken, err.path, err.cursor + 1)
        self.channel.send(node, err.path[err.cursor + 1], nxt, self.cfg.error_size)

    def _rediscover(self, node: int) -> None:
        for dest, q in list(self.pending[node].items()):
            if q and dest not in self.discovery[node] and self.cache[node].find(dest) is None:
                d = self.discovery[node][dest] = [0]
                self._send_rreq(node, dest, d)
