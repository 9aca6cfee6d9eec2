"""Planar geometry: distances, bearings, Gabriel/RNG planarization, ccw sweeps."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi
_SWEEP_EPS = 1e-12


class Position(NamedTuple):
    x: float
    y: float


@dataclass
class NeighborView:
    self_id: int
    self_pos: Position
    neighbors: list[tuple[int, Position]] = field(default_factory=list)

    def ids(self) -> list[int]:
        return [i for i, _ in self.neighbors]


def distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


def bearing(a: Sequence[float], b: Sequence[float]) -> float:
    """Angle of the ray a->b in [0, 2pi), atan2 convention."""
    ang = math.atan2(b[1] - a[1], b[0] - a[0])
    if ang < 0.0:
        ang += TWO_PI
    if ang >= TWO_PI:
        ang -= TWO_PI
    return ang


def _view_arrays(view: NeighborView) -> tuple[np.ndarray, np.ndarray]:
    if not view.neighbors:
        return np.empty((0, 2)), np.empty((0,), dtype=np.int64)
    pts = np.array([p for _, p in view.neighbors], dtype=float).reshape(-1, 2)
    ids = np.array([i for i, _ in view.neighbors], dtype=np.int64)
    return pts, ids


def gabriel_mask(self_pos: Sequence[float], pts: np.ndarray) -> np.ndarray:
    """Boolean keep-mask over ``pts`` for the Gabriel condition at ``self_pos``.

    Edge (self, v) survives unless some other neighbor w lies strictly inside
    the disk whose diameter is self-v.
    """
    k = len(pts)
    if k <= 1:
        return np.ones(k, dtype=bool)
    sx, sy = float(self_pos[0]), float(self_pos[1])
    px, py = pts[:, 0], pts[:, 1]
    # w is strictly inside the circle with diameter s-v iff (w - s).(w - v) < 0;
    # dot[v, w] uses that form, which stays exact when w coincides with v
    dot = (px[None, :] - sx) * (px[None, :] - px[:, None]) + \
        (py[None, :] - sy) * (py[None, :] - py[:, None])
    inside = dot < 0.0
    np.fill_diagonal(inside, False)
    return ~inside.any(axis=1)


def rng_mask(self_pos: Sequence[float], pts: np.ndarray) -> np.ndarray:
    """Keep-mask for the relative-neighborhood (lune emptiness) condition."""
    k = len(pts)
    if k <= 1:
        return np.ones(k, dtype=bool)
    sx, sy = float(self_pos[0]), float(self_pos[1])
    d_sv = (pts[:, 0] - sx) ** 2 + (pts[:, 1] - sy) ** 2
    d_sw = d_sv  # same vector, indexed by witness
    d_vw = (pts[:, None, 0] - pts[None, :, 0]) ** 2 + (pts[:, None, 1] - pts[None, :, 1]) ** 2
    worst = np.maximum(d_sw[None, :], d_vw)
    blocked = worst < d_sv[:, None]
    np.fill_diagonal(blocked, False)
    return ~blocked.any(axis=1)


def _filtered(view: NeighborView, mask_fn) -> NeighborView:
    pts, _ = _view_arrays(view)
    keep = mask_fn(view.self_pos, pts)
    kept = [nb for nb, k in zip(view.neighbors, keep) if k]
    return NeighborView(view.self_id, view.self_pos, kept)


def gabriel_filter(view: NeighborView) -> NeighborView:
    return _filtered(view, gabriel_mask)


def rng_filter(view: NeighborView) -> NeighborView:
    return _filtered(view, rng_mask)


def _sweep_key(at, ref: float, cand):
    node, pos = cand
    delta = (bearing(at, pos) - ref) % TWO_PI
    if delta < _SWEEP_EPS:
        # the reference direction itself comes last (full turn)
        delta = TWO_PI
    return (delta, distance(at, pos), node)


def ccw_first(at: Sequence[float], ref_bearing: float,
              candidates: Sequence[tuple[int, Sequence[float]]]) -> int:
    """First candidate met sweeping counterclockwise from ``ref_bearing``.

    A candidate lying exactly on the reference ray is taken last.
    """
    if not candidates:
        raise ValueError("ccw_first: no candidates")
    return min(candidates, key=lambda c: _sweep_key(at, ref_bearing, c))[0]


def right_hand_next(at: Sequence[float], came_from_bearing: float,
                    candidates: Sequence[tuple[int, Sequence[float]]]) -> int:
    """Right-hand rule: next edge counterclockwise from the incoming edge.

    ``came_from_bearing`` is the travel direction of the edge that brought
    the packet to ``at``; the sweep starts just after its reverse, i.e. just
    after the direction pointing back at the previous hop.
    """
    return ccw_first(at, (came_from_bearing + math.pi) % TWO_PI, candidates)


def _orient(a, b, c) -> float:
    return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])


def segments_cross(p1, p2, q1, q2) -> bool:
    """True iff the open segments p1p2 and q1q2 properly intersect."""
    o1 = _orient(p1, p2, q1)
    o2 = _orient(p1, p2, q2)
    o3 = _orient(q1, q2, p1)
    o4 = _orient(q1, q2, p2)
    return o1 * o2 < 0.0 and o3 * o4 < 0.0


def segment_intersection(p1, p2, q1, q2) -> Position | None:
    """Proper intersection point of two segments, or None."""
    if not segments_cross(p1, p2, q1, q2):
        return None
    rx, ry = p2[0] - p1[0], p2[1] - p1[1]
    sx, sy = q2[0] - q1[0], q2[1] - q1[1]
    denom = rx * sy - ry * sx
    t = ((q1[0] - p1[0]) * sy - (q1[1] - p1[1]) * sx) / denom
    return Position(p1[0] + t * rx, p1[1] + t * ry)


def unit_disk_edges(points: np.ndarray, radius: float) -> set[tuple[int, int]]:
    """All pairs (i < j) with distance <= radius."""
    d2 = ((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
    ii, jj = np.nonzero(np.triu(d2 <= radius * radius, k=1))
    return {(int(i), int(j)) for i, j in zip(ii, jj)}


def planar_edges(points: np.ndarray, radius: float, kind: str = "GG") -> set[tuple[int, int]]:
    """Global planar subgraph: edge kept iff it survives the local filter at both ends."""
    mask_fn = gabriel_mask if kind.upper() == "GG" else rng_mask
    d2 = ((points[:, None, :] - points[None, :, :]) ** 2).sum(axis=2)
    n = len(points)
    kept_at: list[set[int]] = []
    for u in range(n):
        nb = np.flatnonzero(d2[u] <= radius * radius)
        nb = nb[nb != u]
        keep = mask_fn(points[u], points[nb])
        kept_at.append(set(int(v) for v in nb[keep]))
    return {(u, v) for u in range(n) for v in kept_at[u] if u < v and u in kept_at[v]}
