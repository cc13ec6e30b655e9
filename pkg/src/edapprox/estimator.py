"""Fold query edge sets over a ladder of thresholds into an estimate matrix."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .params import LevelParams, ParamSet, at_most
from .query import QueryContext, QueryStats, WindowDistances, query_budget, run_query, shrink_slack
from .window_dp import new_estimates
from .windows import IntervalFamily, WindowedPair


def distance_ladder(gamma: int, d: int) -> list[int]:
    """gamma, 2 gamma, 4 gamma, ... below d, then d itself."""
    rungs = []
    r = gamma
    while r < d:
        rungs.append(r)
        r *= 2
    rungs.append(d)
    return rungs


def fold_value(beta, Delta_q: int, d: int) -> int:
    return at_most(beta * Delta_q, d)


def fold_edges(E: np.ndarray, edges: np.ndarray, value: int) -> None:
    np.minimum(E, np.where(edges, value, E), out=E)


@dataclass
class RungResult:
    Delta_q: int
    value: int
    edges: np.ndarray
    stats: QueryStats
    budget: int


@dataclass
class Aggregate:
    estimates: np.ndarray
    rungs: list = field(default_factory=list)

    @property
    def lookups(self) -> int:
        return sum(r.stats.lookups for r in self.rungs)


def aggregate_estimates(
    wp: WindowedPair,
    family: IntervalFamily,
    Delta: int,
    L: int,
    params: ParamSet,
    seq: np.random.SeedSequence,
    *,
    memo: Optional[WindowDistances] = None,
    inner: Optional[Callable[[int, int, int], int]] = None,
    threads: int = 1,
) -> Aggregate:
    """Run one query tree per ladder rung and min-fold ``beta * Delta_q``.

    ``Delta`` is the additive target of the enclosing call; the rungs depend
    only on the window geometry.
    """
    if L < 1:
        raise ValueError("aggregation needs L >= 1")
    ws = wp.ws
    level: LevelParams = params.level(L)
    memo = memo or WindowDistances(wp, inner)
    rho = params.rho(ws.t)
    slack = shrink_slack(params, family)
    E = new_estimates(ws)
    out = Aggregate(E)
    rungs = distance_ladder(ws.gamma, ws.d)
    seqs = seq.spawn(len(rungs))
    for Delta_q, s in zip(rungs, seqs):
        ctx = QueryContext(
            family=family,
            params=params,
            level=level,
            Delta_q=Delta_q,
            dist=memo.view(Delta_q),
            snapper=family.ladder,
            rho=rho,
            slack=slack,
            edges=np.zeros((ws.m, ws.k), dtype=bool),
        )
        run_query(ctx, 0, np.arange(ws.t, dtype=np.int64), s, threads=threads)
        value = fold_value(level.beta, Delta_q, ws.d)
        fold_edges(E, ctx.edges, value)
        budget = query_budget(params, ws.t, ws.m, ws.k, rho, slack)
        out.rungs.append(RungResult(Delta_q, value, ctx.edges, ctx.stats, budget))
    return out
