"""Random Waypoint mobility, evaluated lazily from per-node leg state."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from . import _kernels
from .engine import Simulator, uniform
from .geometry import Position


@dataclass(frozen=True)
class MobilityParams:
    area: tuple[float, float] = (500.0, 500.0)
    pause: float = 0.0
    speed_min: float = 20.0
    speed_max: float = 20.0

    def __post_init__(self):
        if not 0.0 <= self.speed_min <= self.speed_max:
            raise ValueError(f"need 0 <= speed_min <= speed_max, got {self.speed_min}, {self.speed_max}")
        if self.pause < 0.0:
            raise ValueError(f"pause must be >= 0, got {self.pause}")
        if self.area[0] <= 0 or self.area[1] <= 0:
            raise ValueError(f"area must be positive, got {self.area}")


@dataclass(frozen=True)
class WaypointState:
    """One Random Waypoint leg: wait at ``anchor_pos`` until ``move_start``, then
    travel in a straight line to ``dest`` at ``speed``."""

    node: int
    anchor_pos: Position
    anchor_time: float
    dest: Position
    speed: float
    move_start: float

    @property
    def length(self) -> float:
        return math.hypot(self.dest[0] - self.anchor_pos[0], self.dest[1] - self.anchor_pos[1])

    @property
    def arrival_time(self) -> float:
        length = self.length
        if length == 0.0:
            return self.move_start
        if self.speed <= 0.0:
            return math.inf
        return self.move_start + length / self.speed

    def paused(self, t: float) -> bool:
        return t < self.move_start


def random_point(area: tuple[float, float], rng: random.Random) -> Position:
    return Position(uniform(rng, 0.0, area[0]), uniform(rng, 0.0, area[1]))


def init_positions(n: int, area: tuple[float, float], rng: random.Random) -> list[Position]:
    if n < 1:
        raise ValueError("need at least one node")
    return [random_point(area, rng) for _ in range(n)]


def next_leg(state: WaypointState, params: MobilityParams, rng: random.Random,
             now: float) -> WaypointState:
    """Start a new leg from ``state.dest``: pause, then head to a fresh waypoint."""
    dest = random_point(params.area, rng)
    speed = uniform(rng, params.speed_min, params.speed_max)
    return WaypointState(
        node=state.node,
        anchor_pos=state.dest,
        anchor_time=now,
        dest=dest,
        speed=speed,
        move_start=now + params.pause,
    )


def initial_state(node: int, pos: Position, params: MobilityParams, rng: random.Random,
                  now: float = 0.0) -> WaypointState:
    """A node placed at ``pos`` starts its first pause there."""
    seed_state = WaypointState(node, pos, now, pos, 0.0, now)
    return next_leg(seed_state, params, rng, now)


def leg_kinematics(state: WaypointState) -> tuple[float, float, float]:
    """``(vx, vy, duration)`` of the moving part of a leg."""
    length = state.length
    if length == 0.0:
        return 0.0, 0.0, 0.0
    if state.speed == 0.0:
        return 0.0, 0.0, math.inf
    k = state.speed / length
    return ((state.dest[0] - state.anchor_pos[0]) * k, (state.dest[1] - state.anchor_pos[1]) * k,
            length / state.speed)


def position_at(state: WaypointState, t: float) -> Position:
    if t < state.anchor_time:
        raise ValueError(f"t={t} precedes leg start {state.anchor_time}")
    vx, vy, dur = leg_kinematics(state)
    e = min(max(t - state.move_start, 0.0), dur)
    if e >= dur:
        return state.dest
    return Position(state.anchor_pos[0] + vx * e, state.anchor_pos[1] + vy * e)


class MobilityModel:
    """All nodes' Random Waypoint state, with exact arrival events on the engine.

    Positions are computed on demand; ``positions(t)`` is the vectorized form
    of ``position_at`` and uses the same arithmetic so scalar and array
    lookups agree bit-for-bit.
    """

    def __init__(self, n: int, params: MobilityParams, rng: random.Random,
                 sim: Simulator | None = None, start_positions: list[Position] | None = None,
                 trajectory: TextIO | None = None):
        self.n = n
        self.params = params
        self.rng = rng
        self.sim = sim
        self.trajectory = trajectory
        starts = start_positions if start_positions is not None else init_positions(n, params.area, rng)
        self.states: list[WaypointState] = []
        # rows are x and y; legs are anchor + velocity * clipped elapsed time
        self._a = np.zeros((2, n))
        self._v = np.zeros((2, n))
        self._d = np.zeros((2, n))
        self._t0 = np.zeros(n)
        self._dur = np.zeros(n)
        self._leg: list[tuple] = [None] * n  # type: ignore[list-item]
        self._static = False
        now = sim.now if sim is not None else 0.0
        for i in range(n):
            st = initial_state(i, Position(*starts[i]), params, rng, now)
            self.states.append(st)
            self._install(i, st)

    def _install(self, i: int, st: WaypointState) -> None:
        self.states[i] = st
        vx, vy, dur = leg_kinematics(st)
        self._a[:, i] = st.anchor_pos
        self._v[:, i] = vx, vy
        self._d[:, i] = st.dest
        self._t0[i] = st.move_start
        self._dur[i] = dur
        self._leg[i] = (st.anchor_pos[0], st.anchor_pos[1], vx, vy, st.dest[0], st.dest[1],
                        st.move_start, dur)
        if self.trajectory is not None:
            self.trajectory.write(
                f"{i} {st.move_start:.6f} {st.anchor_pos[0]:.6f} {st.anchor_pos[1]:.6f} "
                f"{st.dest[0]:.6f} {st.dest[1]:.6f} {st.speed:.6f}\n")
        if self.sim is not None:
            arrive = st.arrival_time
            if math.isfinite(arrive):
                self.sim.schedule(arrive, self._arrive, i)

    def _arrive(self, i: int) -> None:
        if self._static:
            return
        self._install(i, next_leg(self.states[i], self.params, self.rng, self.sim.now))

    def advance(self, i: int, now: float) -> WaypointState:
        """Manually roll node ``i`` to its next leg (engine-less use)."""
        self._install(i, next_leg(self.states[i], self.params, self.rng, now))
        return self.states[i]

    def set_static(self, positions: list[Position]) -> None:
        """Pin every node in place for the rest of the run."""
        self._static = True
        for i, p in enumerate(positions):
            p = Position(float(p[0]), float(p[1]))
            st = WaypointState(i, p, 0.0, p, 0.0, math.inf)
            self.states[i] = st
            self._a[:, i] = p
            self._v[:, i] = 0.0
            self._d[:, i] = p
            self._t0[i] = math.inf
            self._dur[i] = 0.0
            self._leg[i] = (p[0], p[1], 0.0, 0.0, p[0], p[1], math.inf, 0.0)

    def position(self, i: int, t: float) -> tuple[float, float]:
        ax, ay, vx, vy, dx, dy, t0, dur = self._leg[i]
        e = min(max(t - t0, 0.0), dur)
        if e >= dur:
            return dx, dy
        return ax + vx * e, ay + vy * e

    def position_matrix(self, t: float) -> np.ndarray:
        """``(2, n)`` array of every node's position at ``t``."""
        e = np.minimum(np.maximum(t - self._t0, 0.0), self._dur)
        return np.where(e >= self._dur, self._d, self._a + self._v * e)

    def neighbors_within(self, node: int, t: float, r2: float) -> np.ndarray:
        """Ids of nodes within squared distance ``r2`` of ``node`` at ``t``."""
        return _kernels.neighbors(self._a, self._v, self._d, self._t0, self._dur, node, t, r2)

    def positions(self, t: float) -> tuple[np.ndarray, np.ndarray]:
        p = self.position_matrix(t)
        return p[0], p[1]
