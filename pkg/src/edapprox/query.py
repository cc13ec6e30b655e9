"""Recursive clique-sampling query over live windows.

A query node at depth ``i`` samples cliques around random live A-windows.
A clique holding more than a ``1/rho`` share of the live set is emitted
whole; otherwise the live set shrinks to the neighbourhoods where the
clique is unusually dense and the node recurses.  At depth ``i_max`` every
live A x B pair is tested directly.
"""

from __future__ import annotations

import math
import threading
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Union

import numpy as np

from .exact import batch_myers64, build_peq, exact_ed
from .params import LevelParams, ParamSet, Power, at_most
from .windows import IntervalFamily, WindowedPair


# -- distance memo ------------------------------------------------------------

class WindowDistances:
    """Symmetric memo of window distances with lookup/evaluation counters.

    ``inner(x, y, key)`` computes one distance; when it is ``None`` the
    distances are exact and computed in vectorised batches, and the memo is
    shared by every key because the value does not depend on it.
    """

    def __init__(self, wp: WindowedPair, inner: Optional[Callable[[int, int, int], int]] = None):
        self.wp = wp
        self.inner = inner
        self._tables: dict = {}
        self._lock = threading.Lock()
        self.lookups = 0
        self.evaluations = 0
        d = wp.ws.d
        self._peq = build_peq(wp.windows, wp.alphabet_size) if inner is None and d <= 64 else None

    def view(self, key: int) -> "DistanceView":
        return DistanceView(self, None if self.inner is None else key)

    def _table(self, key) -> np.ndarray:
        tab = self._tables.get(key)
        if tab is None:
            t = self.wp.ws.t
            tab = np.full((t, t), -1, dtype=np.int64)
            np.fill_diagonal(tab, 0)
            self._tables[key] = tab
        return tab

    def _fill(self, key, xs: np.ndarray, ys: np.ndarray) -> None:
        tab = self._table(key)
        missing = tab[xs, ys] < 0
        if not missing.any():
            return
        xs, ys = xs[missing], ys[missing]
        # each unordered pair once
        lo, hi = np.minimum(xs, ys), np.maximum(xs, ys)
        pairs = np.unique(np.stack([lo, hi], axis=1), axis=0)
        lo, hi = pairs[:, 0], pairs[:, 1]
        if self.inner is not None:
            vals = np.array([self.inner(int(x), int(y), key) for x, y in zip(lo, hi)], dtype=np.int64)
        elif self._peq is not None:
            vals = batch_myers64(self._peq, self.wp.ws.d, lo, self.wp.windows[hi])
        else:
            w = self.wp.windows
            vals = np.array([exact_ed(w[x].tolist(), w[y].tolist()) for x, y in zip(lo, hi)], dtype=np.int64)
        tab[lo, hi] = vals
        tab[hi, lo] = vals
        self.evaluations += len(vals)

    def get(self, key, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        xs = np.asarray(xs, dtype=np.int64)
        ys = np.asarray(ys, dtype=np.int64)
        xs, ys = np.broadcast_arrays(xs, ys)
        with self._lock:
            self.lookups += int(np.count_nonzero(xs != ys))
            self._fill(key, xs.ravel(), ys.ravel())
            return self._table(key)[xs, ys]


@dataclass
class DistanceView:
    memo: WindowDistances
    key: Optional[int]

    def row(self, x: int, ys: np.ndarray) -> np.ndarray:
        return self.memo.get(self.key, np.int64(x), ys)

    def block(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        return self.memo.get(self.key, np.asarray(xs)[:, None], np.asarray(ys)[None, :])


class MatrixDistances:
    """Distances read from a fixed symmetric matrix (used to fuzz clique properties)."""

    def __init__(self, matrix: np.ndarray):
        self.matrix = np.asarray(matrix, dtype=np.int64)
        self.lookups = 0

    def row(self, x: int, ys: np.ndarray) -> np.ndarray:
        ys = np.asarray(ys, dtype=np.int64)
        self.lookups += int(np.count_nonzero(ys != x))
        return self.matrix[x, ys]

    def block(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        xs, ys = np.asarray(xs), np.asarray(ys)
        self.lookups += int(np.count_nonzero(xs[:, None] != ys[None, :]))
        return self.matrix[np.ix_(xs, ys)]


# -- cliques and densities ----------------------------------------------------

def radius(Delta_q: int, c: "int | Power", tau: int, cap: int) -> int:
    """``min(Delta_q * c**tau, cap)`` without materializing huge powers."""
    if isinstance(c, Power):
        return at_most(c**tau * Delta_q, cap)
    if tau * math.log2(c) + math.log2(Delta_q) > cap.bit_length() + 1:
        return cap
    return min(Delta_q * c**tau, cap)


@dataclass(frozen=True)
class Clique:
    center: int
    tau: int
    radius: int
    members: np.ndarray  # sorted global window ids

    def __contains__(self, wid: int) -> bool:
        i = np.searchsorted(self.members, wid)
        return bool(i < len(self.members) and self.members[i] == wid)


def clique_members(x: int, live: np.ndarray, r: int, dist) -> np.ndarray:
    others = live[live != x]
    close = others[dist.row(x, others) <= r]
    return np.sort(np.append(close, x))


def sample_tau(rng: np.random.Generator, tau_max: int) -> int:
    """Uniform over ``1..tau_max``; ``tau_max`` may exceed 64 bits."""
    if tau_max < 2**62:
        return int(rng.integers(1, tau_max + 1))
    nbytes = (tau_max.bit_length() + 7) // 8
    while True:
        v = int.from_bytes(rng.bytes(nbytes), "little") >> (8 * nbytes - tau_max.bit_length())
        if v < tau_max:
            return v + 1


def sample_clique(
    live: np.ndarray,
    m: int,
    Delta_q: int,
    level: LevelParams,
    tau_max: int,
    rng: np.random.Generator,
    dist,
    cap: int,
) -> Clique:
    """Ball of radius ``Delta_q * c**tau`` around a uniform live A-window."""
    live_a = live[live < m]
    if len(live_a) == 0:
        raise ValueError("no live A-window to sample")
    x = int(live_a[rng.integers(len(live_a))])
    tau = sample_tau(rng, tau_max)
    r = radius(Delta_q, level.c, tau, cap)
    return Clique(x, tau, r, clique_members(x, live, r, dist))


@dataclass(frozen=True)
class DensityTriple:
    global_: Fraction
    local: Fraction
    relative: Fraction


def densities(clique: Clique, live: np.ndarray, lo: int, hi: int, snapper) -> DensityTriple:
    """Snapped global, local and relative density on the global id range ``[lo, hi)``."""
    in_live = (live >= lo) & (live < hi)
    if not in_live.any():
        raise ValueError("interval holds no live window")
    in_c = (clique.members >= lo) & (clique.members < hi)
    g = Fraction(snapper(len(clique.members)), snapper(len(live)))
    loc = Fraction(snapper(int(in_c.sum())), snapper(int(in_live.sum())))
    rel = loc / g if g else Fraction(0)
    return DensityTriple(g, loc, rel)


@dataclass(frozen=True)
class BigClique:
    members: np.ndarray


@dataclass(frozen=True)
class NextLive:
    members: np.ndarray
    dense: int  # number of dense intervals


def _counts(ids: np.ndarray, t: int, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    mark = np.zeros(t + 1, dtype=np.int64)
    np.add.at(mark, ids + 1, 1)
    pre = np.cumsum(mark)
    return pre[hi] - pre[lo]


def dense_intervals(
    family: IntervalFamily,
    clique: Clique,
    live: np.ndarray,
    rho: float,
    snapper,
) -> Union[BigClique, NextLive]:
    """Big clique if the snapped global density exceeds ``1/rho``; else the
    union of ``L cap 7I`` over base intervals whose relative density on
    ``7I`` is at least ``rho``."""
    sc, sl = snapper(len(clique.members)), snapper(len(live))
    if sc * rho > sl:
        return BigClique(clique.members)
    lo, hi = family.scan
    t = family.ws.t
    live_cnt = _counts(live, t, lo, hi)
    c_cnt = _counts(clique.members, t, lo, hi)
    s_live = snapper.many(live_cnt).astype(np.float64)
    s_c = snapper.many(c_cnt).astype(np.float64)
    # snap|C cap 7I| / snap|L cap 7I|  >=  rho * snap|C| / snap|L|
    dense = (live_cnt > 0) & (s_c * sl >= rho * sc * s_live)
    keep = np.zeros(t + 1, dtype=np.int64)
    np.add.at(keep, lo[dense], 1)
    np.add.at(keep, hi[dense], -1)
    covered = np.cumsum(keep)[:t] > 0
    return NextLive(live[covered[live]], int(dense.sum()))


# -- the query tree -----------------------------------------------------------

@dataclass
class QueryStats:
    lookups: int = 0
    nodes: int = 0
    big_cliques: int = 0
    trace: list = field(default_factory=list)  # (path, depth, live size, next size or None)
    shrink_violations: list = field(default_factory=list)


@dataclass
class QueryContext:
    family: IntervalFamily
    params: ParamSet
    level: LevelParams
    Delta_q: int
    dist: object
    snapper: object
    rho: float
    slack: float
    edges: np.ndarray  # bool |A| x |B|
    stats: QueryStats = field(default_factory=QueryStats)
    lock: threading.Lock = field(default_factory=threading.Lock)

    @property
    def ws(self):
        return self.family.ws


def shrink_slack(params: ParamSet, family: IntervalFamily) -> float:
    """Factor ``s`` with ``|next live| <= s * |live| / rho`` on small cliques.

    Every clique member lies in at most 7 scaled intervals per rung, and
    snapping loses less than the ladder ratio ``phi`` on each count, so
    ``s = 7 * rungs * phi**2`` is always enough.
    """
    if params.shrink_slack is not None:
        return float(params.shrink_slack)
    phi = family.ladder.ratio_bound()
    return 7 * len(family.lengths) * phi * phi


def query_budget(params: ParamSet, t: int, m: int, k: int, rho: float, slack: float) -> int:
    """Upper bound on distance lookups made by one query tree."""
    if params.mode == "paper":
        return math.floor(t ** (1 + 3 / params.i_max))
    shrink = slack / rho
    total, nodes = 0, 1
    for i in range(params.i_max):
        size = min(t, math.floor(t * shrink**i))
        K = params.children(t, i)
        total += nodes * K * max(size - 1, 0)
        nodes *= K
    size = min(t, math.floor(t * shrink**params.i_max))
    total += nodes * min(m * k, size * size // 4)
    return total


def _emit(ctx: QueryContext, a_ids: np.ndarray, b_ids: np.ndarray, ok: np.ndarray | None = None) -> None:
    m = ctx.ws.m
    with ctx.lock:
        if ok is None:
            ctx.edges[np.ix_(a_ids, b_ids - m)] = True
        else:
            ctx.edges[np.ix_(a_ids, b_ids - m)] |= ok


def run_query(ctx: QueryContext, i: int, live: np.ndarray, seq: np.random.SeedSequence, path: tuple = (), threads: int = 1) -> None:
    """Query node at depth ``i``; children draw from ``seq.spawn``."""
    ws, params = ctx.ws, ctx.params
    m = ws.m
    with ctx.lock:
        ctx.stats.nodes += 1
    if len(live) == 0:
        return
    if i >= params.i_max:
        a_ids, b_ids = live[live < m], live[live >= m]
        if len(a_ids) and len(b_ids):
            thr = radius(ctx.Delta_q, ctx.level.c, 1, 2 * ws.d)
            block = ctx.dist.block(a_ids, b_ids)
            with ctx.lock:
                ctx.stats.lookups += int(block.size)
            _emit(ctx, a_ids, b_ids, block <= thr)
        return

    K = params.children(ws.t, i)
    children = seq.spawn(K)

    def child(j: int) -> None:
        rng = np.random.default_rng(children[j])
        if not (live < m).any():
            return
        clique = sample_clique(live, m, ctx.Delta_q, ctx.level, int(params.tau_max), rng, ctx.dist, 2 * ws.d)
        with ctx.lock:
            ctx.stats.lookups += len(live) - 1
        res = dense_intervals(ctx.family, clique, live, ctx.rho, ctx.snapper)
        if isinstance(res, BigClique):
            mem = res.members
            with ctx.lock:
                ctx.stats.big_cliques += 1
                ctx.stats.trace.append((path + (j,), i, len(live), None))
            _emit(ctx, mem[mem < m], mem[mem >= m])
            return
        nxt = res.members
        with ctx.lock:
            ctx.stats.trace.append((path + (j,), i, len(live), len(nxt)))
            if len(nxt) > ctx.slack * len(live) / ctx.rho:
                ctx.stats.shrink_violations.append((path + (j,), len(live), len(nxt)))
        run_query(ctx, i + 1, nxt, children[j], path + (j,))

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            list(pool.map(child, range(K)))
    else:
        for j in range(K):
            child(j)
