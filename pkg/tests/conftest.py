import math

import pytest

from vanetsim.config import ScenarioConfig
from vanetsim.metrics import PacketLedger
from vanetsim.packets import DropReason


def make_ledger(entries):
    """entries: (send_time, recv_time | None, reason | None[, size])."""
    ledger = PacketLedger()
    for e in entries:
        ts, tr, reason = e[:3]
        size = e[3] if len(e) > 3 else 512
        rec = ledger.register(0, 0, 1, size, ts)
        if tr is not None:
            ledger.received(rec.pkt_id, tr, 1)
        elif reason is not None:
            ledger.dropped(rec.pkt_id, reason)
    return ledger


def chain_positions(k, spacing=200.0):
    """k nodes on a line; only consecutive nodes are within 250 m."""
    return [(10.0 + i * spacing, 250.0) for i in range(k)]


def static_cfg(protocol, n, **kw):
    base = dict(protocol=protocol, nodes=n, connections=1, area_width=max(500.0, 250.0 * n),
                area_height=500.0, pause=0.0, speed_min=0.0, speed_max=0.0, sim_time=60.0)
    base.update(kw)
    return ScenarioConfig(**base)


@pytest.fixture
def ledger_factory():
    return make_ledger


@pytest.fixture
def drop():
    return DropReason


def close(a, b, tol=1e-9):
    return math.isclose(a, b, rel_tol=0.0, abs_tol=tol)


# acceptance criterion outcomes, printed once at the end of the session
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
