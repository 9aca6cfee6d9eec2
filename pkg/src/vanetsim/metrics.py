"""Per-packet ledger and the five delivery metrics computed from it."""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Iterable

from .packets import DropReason

LEDGER_HEADER = "# pkt_id flow src dst size Ts Tr reason hops"


class LedgerError(RuntimeError):
    pass


@dataclass(slots=True)
class PacketRecord:
    pkt_id: int
    flow_id: int
    src: int
    dst: int
    size: int
    send_time: float
    recv_time: float | None = None
    drop_reason: DropReason | None = None
    hops: int = 0

    @property
    def delivered(self) -> bool:
        return self.recv_time is not None

    @property
    def in_flight(self) -> bool:
        return self.recv_time is None and self.drop_reason is None


class PacketLedger:
    """Send/receive/drop records for every originated data packet."""

    def __init__(self):
        self.records: list[PacketRecord] = []
        self.on_drop: Callable[[PacketRecord, int | None], None] | None = None

    def __len__(self) -> int:
        return len(self.records)

    def register(self, flow_id: int, src: int, dst: int, size: int, t: float) -> PacketRecord:
        rec = PacketRecord(len(self.records), flow_id, src, dst, size, t)
        self.records.append(rec)
        return rec

    def received(self, pkt_id: int, t: float, hops: int) -> None:
        rec = self.records[pkt_id]
        if rec.recv_time is not None or rec.drop_reason is not None:
            raise LedgerError(f"packet {pkt_id} already settled")
        if t < rec.send_time:
            raise LedgerError(f"packet {pkt_id} received before it was sent")
        rec.recv_time = t
        rec.hops = hops

    def dropped(self, pkt_id: int, reason: DropReason, hops: int = 0, node: int | None = None) -> None:
        rec = self.records[pkt_id]
        if rec.recv_time is not None or rec.drop_reason is not None:
            raise LedgerError(f"packet {pkt_id} already settled")
        rec.drop_reason = reason
        rec.hops = hops
        if self.on_drop is not None:
            self.on_drop(rec, node)

    def counts(self) -> tuple[int, int, int, int]:
        """(sent, delivered, dropped, in_flight)."""
        sent = len(self.records)
        delivered = sum(1 for r in self.records if r.recv_time is not None)
        dropped = sum(1 for r in self.records if r.drop_reason is not None)
        return sent, delivered, dropped, sent - delivered - dropped

    def check_conservation(self) -> None:
        sent, delivered, dropped, in_flight = self.counts()
        if in_flight < 0 or sent != delivered + dropped + in_flight:
            raise LedgerError(f"conservation violated: {sent} != {delivered}+{dropped}+{in_flight}")

    # -- persistence -------------------------------------------------------

    def dump(self, path: str | Path, meta: dict[str, object] | None = None) -> None:
        with open(path, "w") as fh:
            for k, v in (meta or {}).items():
                fh.write(f"#! {k}={v}\n")
            fh.write(LEDGER_HEADER + "\n")
            for r in self.records:
                tr = "-" if r.recv_time is None else repr(r.recv_time)
                reason = "-" if r.drop_reason is None else r.drop_reason.value
                fh.write(f"{r.pkt_id} {r.flow_id} {r.src} {r.dst} {r.size} "
                         f"{r.send_time!r} {tr} {reason} {r.hops}\n")

    @classmethod
    def load(cls, path: str | Path) -> tuple["PacketLedger", dict[str, str]]:
        ledger = cls()
        meta: dict[str, str] = {}
        with open(path) as fh:
            for lineno, line in enumerate(fh, 1):
                if line.startswith("#!"):
                    k, _, v = line[2:].strip().partition("=")
                    meta[k] = v
                    continue
                if not line.strip() or line.startswith("#"):
                    continue
                parts = line.split()
                if len(parts) != 9:
                    raise LedgerError(f"{path}:{lineno}: expected 9 fields, got {len(parts)}")
                rec = PacketRecord(
                    int(parts[0]), int(parts[1]), int(parts[2]), int(parts[3]), int(parts[4]),
                    float(parts[5]),
                    None if parts[6] == "-" else float(parts[6]),
                    None if parts[7] == "-" else DropReason(parts[7]),
                    int(parts[8]),
                )
                if rec.pkt_id != len(ledger.records):
                    raise LedgerError(f"{path}:{lineno}: packet ids must be dense and ordered")
                ledger.records.append(rec)
        return ledger, meta


# -- metric formulas -------------------------------------------------------

def _sent_received(ledger: PacketLedger | Iterable[PacketRecord]) -> tuple[int, int]:
    records = ledger.records if isinstance(ledger, PacketLedger) else list(ledger)
    return len(records), sum(1 for r in records if r.recv_time is not None)


def pdr(ledger) -> float | None:
    """Delivered over sent, in percent. None when nothing was sent."""
    sent, received = _sent_received(ledger)
    if sent == 0:
        return None
    return 100.0 * received / sent


def avg_e2e_delay(ledger) -> float | None:
    """Mean (Tr - Ts) over delivered packets, in milliseconds."""
    records = ledger.records if isinstance(ledger, PacketLedger) else list(ledger)
    delays = [r.recv_time - r.send_time for r in records if r.recv_time is not None]
    if not delays:
        return None
    return math.fsum(delays) / len(delays) * 1000.0


def packet_loss(ledger) -> tuple[int, float] | None:
    """(sent - received, fraction of sent). Packets still in flight count as lost."""
    sent, received = _sent_received(ledger)
    if sent == 0:
        return None
    lost = sent - received
    return lost, lost / sent


def packet_loss_ratio(ledger) -> float | None:
    sent, received = _sent_received(ledger)
    if sent == 0:
        return None
    return (sent - received) / sent * 100.0


def avg_throughput(ledger, start: float, stop: float) -> float:
    """Delivered payload bits per second over [start, stop], in kilobits/s."""
    if stop <= start:
        raise ValueError(f"throughput window needs stop > start, got [{start}, {stop}]")
    records = ledger.records if isinstance(ledger, PacketLedger) else list(ledger)
    recvd_size = sum(r.size for r in records if r.recv_time is not None)
    return recvd_size / (stop - start) * (8 / 1000)


@dataclass
class MetricsReport:
    sent: int
    received: int
    in_flight: int
    pdr: float | None
    avg_e2e_delay: float | None
    packet_loss_count: int | None
    packet_loss: float | None
    packet_loss_ratio: float | None
    avg_throughput: float
    drops: dict[str, int] = field(default_factory=dict)


def compute_report(ledger: PacketLedger, start: float, stop: float) -> MetricsReport:
    sent, received, _, in_flight = ledger.counts()
    loss = packet_loss(ledger)
    drops = Counter(r.drop_reason.value for r in ledger.records if r.drop_reason is not None)
    return MetricsReport(
        sent=sent,
        received=received,
        in_flight=in_flight,
        pdr=pdr(ledger),
        avg_e2e_delay=avg_e2e_delay(ledger),
        packet_loss_count=None if loss is None else loss[0],
        packet_loss=None if loss is None else loss[1],
        packet_loss_ratio=packet_loss_ratio(ledger),
        avg_throughput=avg_throughput(ledger, start, stop),
        drops={r.value: drops.get(r.value, 0) for r in DropReason},
    )
