"""Hot-path neighbor query, compiled with numba when it is installed.

Both implementations evaluate each node's leg with the same expression as
``MobilityModel.position`` so the neighbor sets agree exactly.
"""

from __future__ import annotations

import numpy as np


def neighbors_numpy(a, v, d, t0, dur, node, t, r2):
    e = np.minimum(np.maximum(t - t0, 0.0), dur)
    p = np.where(e >= dur, d, a + v * e)
    q = p - p[:, node:node + 1]
    q *= q
    mask = q[0] + q[1] <= r2
    mask[node] = False
    return mask.nonzero()[0]


def _neighbors_loop(a, v, d, t0, dur, node, t, r2):
    n = t0.shape[0]
    px = np.empty(n)
    py = np.empty(n)
    for i in range(n):
        e = min(max(t - t0[i], 0.0), dur[i])
        if e >= dur[i]:
            px[i] = d[0, i]
            py[i] = d[1, i]
        else:
            px[i] = a[0, i] + v[0, i] * e
            py[i] = a[1, i] + v[1, i] * e
    x0 = px[node]
    y0 = py[node]
    out = np.empty(n, dtype=np.int64)
    k = 0
    for i in range(n):
        if i == node:
            continue
        dx = px[i] - x0
        dy = py[i] - y0
        if dx * dx + dy * dy <= r2:
            out[k] = i
            k += 1
    return out[:k]


try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    HAVE_NUMBA = False
    neighbors = neighbors_numpy
else:
    HAVE_NUMBA = True
    # no fastmath: IEEE semantics must match the numpy path bit for bit
    neighbors = numba.njit(cache=True)(_neighbors_loop)
