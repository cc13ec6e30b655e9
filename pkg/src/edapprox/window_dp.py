"""Minimum-cost monotone window mapping for an estimate matrix."""

from __future__ import annotations

import numpy as np

from .windows import WindowMapping, WindowSet, mapping_cost

INF = np.int64(1) << np.int64(60)


def new_estimates(ws: WindowSet) -> np.ndarray:
    """An |A| x |B| estimate matrix filled with the trivial bound d."""
    return np.full((ws.m, ws.k), ws.d, dtype=np.int64)


def _check(ws: WindowSet, E: np.ndarray) -> np.ndarray:
    E = np.asarray(E, dtype=np.int64)
    if E.shape != (ws.m, ws.k):
        raise ValueError(f"estimate matrix has shape {E.shape}, expected {(ws.m, ws.k)}")
    return E


def ed_from_estimates(ws: WindowSet, E: np.ndarray) -> int:
    """Minimum over monotone mappings of ``2 sum E(a, mu(a)) + 2 sum gaps``.

    ``g[j]`` holds the best cost of the windows processed so far given that
    the most recent matched image is ``j`` (trailing deletions included).
    The gap to the next image ``j2`` is ``gamma * |j2 - j - s|``; the part
    with ``j <= j2 - s`` collapses into a running minimum, the remaining
    ``s - 1`` offsets are handled explicitly, so each A-window costs
    ``O(k * s)`` vectorised work.
    """
    E = _check(ws, E)
    m, k, d, s = ws.m, ws.k, ws.d, ws.s
    w = 2 * ws.gamma
    idx = np.arange(k, dtype=np.int64)
    g = np.full(k, INF, dtype=np.int64)
    for a in range(m):
        cand = np.full(k, INF, dtype=np.int64)
        if a > 0:
            fwd = np.minimum.accumulate(g - w * idx) + w * idx
            if s < k:
                cand[s:] = fwd[: k - s]
            for r in range(1, min(s, k)):
                np.minimum(cand[r:], g[:-r] + w * (s - r), out=cand[r:])
        cand = np.minimum(cand, 2 * d * a)
        f = 2 * E[a] + cand
        g = np.minimum(f, np.minimum(g + 2 * d, INF))
    return int(min(2 * d * m, g.min(initial=INF)))


def brute_force_mapping_min(ws: WindowSet, E: np.ndarray, *, max_a: int = 6, max_b: int = 10) -> int:
    """Exhaustive minimum over every monotone partial mapping."""
    E = _check(ws, E)
    if ws.m > max_a or ws.k > max_b:
        raise ValueError("instance too large for exhaustive enumeration")
    dist = lambda a, b: int(E[a, b])  # noqa: E731
    best = None
    images: list = [None] * ws.m

    def walk(a: int, lowest: int) -> None:
        nonlocal best
        if a == ws.m:
            c = mapping_cost(WindowMapping(tuple(images)), ws, dist)
            best = c if best is None else min(best, c)
            return
        images[a] = None
        walk(a + 1, lowest)
        for j in range(lowest, ws.k):
            images[a] = j
            walk(a + 1, j + 1)
        images[a] = None

    walk(0, 0)
    return int(best)
