"""Exact reference layer for tests: window graphs, optimal mappings, envelopes."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .exact import banded_ed, exact_ed
from .windows import WindowedPair, WindowMapping

ORACLE_MAX_T = 512


def _budget(wp: WindowedPair, max_t: int) -> None:
    if wp.ws.t > max_t:
        raise ValueError(f"t = {wp.ws.t} exceeds the oracle budget {max_t}")


def exact_window_matrix(wp: WindowedPair, *, max_t: int = ORACLE_MAX_T) -> np.ndarray:
    """|A| x |B| exact window distances, one plain DP per pair."""
    _budget(wp, max_t)
    ws = wp.ws
    win = [w.tolist() for w in wp.windows]
    out = np.empty((ws.m, ws.k), dtype=np.int64)
    for a in range(ws.m):
        for b in range(ws.k):
            out[a, b] = exact_ed(win[a], win[ws.m + b])
    return out


def exact_pairwise_graph(wp: WindowedPair, Delta: int, *, max_t: int = ORACLE_MAX_T) -> set[tuple[int, int]]:
    """All (a, b) with ED(a, b) <= Delta; b is indexed within the B side."""
    _budget(wp, max_t)
    ws = wp.ws
    win = [w.tolist() for w in wp.windows]
    return {
        (a, b)
        for a in range(ws.m)
        for b in range(ws.k)
        if banded_ed(win[a], win[ws.m + b], Delta) is not None
    }


def optimal_window_matching(wp: WindowedPair, E: Optional[np.ndarray] = None, *, max_t: int = ORACLE_MAX_T) -> tuple[WindowMapping, int]:
    """Cheapest monotone mapping under ``E`` (exact distances by default), with its arg-min."""
    ws = wp.ws
    if E is None:
        E = exact_window_matrix(wp, max_t=max_t)
    m, k, d, gamma, s = ws.m, ws.k, ws.d, ws.gamma, ws.s
    inf = float("inf")
    # g[a][j]: best cost over windows 0..a whose last image is j; back[a][j] is
    # None when a itself is deleted, else the previous image (-1 for none).
    g = [[inf] * k for _ in range(m)]
    back: list[list] = [[None] * k for _ in range(m)]
    for a in range(m):
        for j in range(k):
            best, arg = 2 * d * a, -1
            if a > 0:
                for j2 in range(j):
                    c = g[a - 1][j2] + 2 * gamma * abs(j - j2 - s)
                    if c < best:
                        best, arg = c, j2
            f = 2 * int(E[a][j]) + best
            carried = g[a - 1][j] + 2 * d if a > 0 else inf
            if f <= carried:
                g[a][j], back[a][j] = f, arg
            else:
                g[a][j] = carried
    cost, last = 2 * d * m, None
    for j in range(k):
        if m and g[m - 1][j] < cost:
            cost, last = g[m - 1][j], j
    images: list = [None] * m
    a = m - 1
    while last is not None and last >= 0 and a >= 0:
        prev = back[a][last]
        if prev is None:
            a -= 1
            continue
        images[a] = last
        last, a = prev, a - 1
    return WindowMapping(tuple(images)), int(cost)


@dataclass(frozen=True)
class Envelope:
    exact: int
    estimate: int
    ratio: float
    additive_slack: float
    passed: bool


def verify_envelope(a: Sequence, b: Sequence, estimate: int, Delta: int) -> Envelope:
    """Compare an estimate with the exact distance; ratio is 1 by convention when the exact distance is zero."""
    exact = exact_ed(a, b)
    ratio = estimate / exact if exact else 1.0
    return Envelope(exact, estimate, ratio, (estimate - exact) / Delta, estimate >= exact)
