"""Discrete-event core: virtual clock, ordered event queue and named RNG streams."""

from __future__ import annotations

import hashlib
import heapq
import random
from dataclasses import dataclass
from typing import Any, Callable, NamedTuple


class PastEventError(RuntimeError):
    """Raised when an event is scheduled before the current clock."""


class SimEvent(NamedTuple):
    fire_at: float
    seq: int
    action: Callable[..., Any]
    args: tuple


@dataclass(frozen=True)
class RunSummary:
    events: int
    clock: float


class RngStream(random.Random):
    """A ``random.Random`` keyed by ``(seed, label)``.

    Each stochastic concern (mobility, traffic, jitter, ...) draws from its own
    stream so adding a consumer never shifts the values another one sees.
    """

    def __new__(cls, seed: int, label: str):
        return super().__new__(cls)

    def __init__(self, seed: int, label: str):
        self.base_seed = int(seed)
        self.label = label
        digest = hashlib.sha256(f"{self.base_seed}:{label}".encode()).digest()
        super().__init__(int.from_bytes(digest[:8], "big"))


def uniform(stream: random.Random, lo: float, hi: float) -> float:
    """Draw from ``[lo, hi)``; degenerate intervals return ``lo``."""
    if lo > hi:
        raise ValueError(f"uniform: lo={lo} > hi={hi}")
    if lo == hi:
        return lo
    return lo + (hi - lo) * stream.random()


class Simulator:
    """Single-threaded event loop.

    Events are ordered by ``(fire_at, seq)`` where ``seq`` is the insertion
    counter, so simultaneous events fire in the order they were scheduled.
    """

    def __init__(self, seed: int = 0, log_events: bool = False):
        self.seed = int(seed)
        self.now = 0.0
        self._queue: list[tuple] = []
        self._seq = 0
        self._streams: dict[str, RngStream] = {}
        self.events_processed = 0
        self.log: list[tuple[float, int, str]] | None = [] if log_events else None

    def stream(self, label: str) -> RngStream:
        s = self._streams.get(label)
        if s is None:
            s = self._streams[label] = RngStream(self.seed, label)
        return s

    def schedule(self, fire_at: float, action: Callable[..., Any], *args: Any) -> int:
        if fire_at < self.now:
            raise PastEventError(
                f"event {getattr(action, '__qualname__', action)!s} scheduled at "
                f"t={fire_at!r} but clock is at t={self.now!r}"
            )
        seq = self._seq
        self._seq = seq + 1
        heapq.heappush(self._queue, (fire_at, seq, action, args))
        return seq

    def schedule_in(self, delay: float, action: Callable[..., Any], *args: Any) -> int:
        return self.schedule(self.now + delay, action, *args)

    def pending(self) -> int:
        return len(self._queue)

    def peek(self) -> SimEvent | None:
        return SimEvent(*self._queue[0]) if self._queue else None

    def run_until(self, t_end: float) -> RunSummary:
        """Process every event with ``fire_at <= t_end``; the clock ends at ``t_end``."""
        queue = self._queue
        pop = heapq.heappop
        log = self.log
        n = 0
        while queue and queue[0][0] <= t_end:
            fire_at, seq, action, args = pop(queue)
            self.now = fire_at
            if log is not None:
                log.append((fire_at, seq, getattr(action, "__qualname__", repr(action))))
            action(*args)
            n += 1
        if t_end > self.now:
            self.now = t_end
        self.events_processed += n
        return RunSummary(events=n, clock=self.now)
