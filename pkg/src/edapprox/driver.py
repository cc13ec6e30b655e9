"""Top-level recursion over levels and the ``approx_ed`` entry point."""

from __future__ import annotations

import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Any, Optional, Sequence

import numpy as np

from .estimator import aggregate_estimates
from .exact import exact_ed
from .params import ParamSet, derive_params
from .query import WindowDistances
from .window_dp import ed_from_estimates
from .windows import IntervalFamily, WindowedPair, build_windows


class BudgetExceeded(AssertionError):
    pass


class ShrinkViolation(AssertionError):
    pass


@dataclass
class RunReport:
    mode: str
    n: int
    delta: str
    Delta: int
    seed: int
    estimate: int = 0
    path: str = "exact"
    true_distance: Optional[int] = None
    sound: Optional[bool] = None
    query_counts: dict = field(default_factory=dict)  # level -> lookups
    evaluations: dict = field(default_factory=dict)  # level -> distinct distances computed
    budgets: dict = field(default_factory=dict)  # level -> summed per-tree bound
    live_set_trace: list = field(default_factory=list)
    big_cliques: int = 0
    shrink_violations: int = 0
    budget_violations: int = 0
    rungs: list = field(default_factory=list)
    phase_times_ms: dict = field(default_factory=dict)
    keep_edges: bool = False
    edge_sets: list = field(default_factory=list)  # (Delta_q, [[a, b], ...]) when keep_edges

    def to_json(self, *, timings: bool = False) -> dict:
        out = {
            "mode": self.mode,
            "n": self.n,
            "delta": self.delta,
            "Delta": self.Delta,
            "seed": self.seed,
            "path": self.path,
            "estimate": self.estimate,
            "true_distance": self.true_distance,
            "sound": self.sound,
            "query_counts": {str(k): v for k, v in sorted(self.query_counts.items())},
            "evaluations": {str(k): v for k, v in sorted(self.evaluations.items())},
            "budgets": {str(k): v for k, v in sorted(self.budgets.items())},
            "live_set_trace": self.live_set_trace,
            "big_cliques": self.big_cliques,
            "shrink_violations": self.shrink_violations,
            "budget_violations": self.budget_violations,
            "rungs": self.rungs,
            "phase_times_ms": {k: round(v, 3) for k, v in self.phase_times_ms.items()} if timings else {},
        }
        return out


@contextmanager
def _phase(report: Optional[RunReport], name: str):
    t0 = time.perf_counter()
    try:
        yield
    finally:
        if report is not None:
            dt = (time.perf_counter() - t0) * 1000
            report.phase_times_ms[name] = report.phase_times_ms.get(name, 0.0) + dt


def _pair_seq(seq: np.random.SeedSequence, *key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seq.entropy, spawn_key=tuple(seq.spawn_key) + tuple(key))


def main(
    a: Sequence,
    b: Sequence,
    Delta: int,
    L: int,
    params: ParamSet,
    seq: np.random.SeedSequence,
    report: Optional[RunReport] = None,
    *,
    threads: int = 1,
) -> int:
    """Level-``L`` estimate of ED(a, b) for equal-length inputs; never below the truth."""
    n = len(a)
    if len(b) != n:
        raise ValueError("main expects equal-length strings")
    if not 1 <= Delta <= max(n, 1):
        raise ValueError("Delta must lie in [1, n]")
    if L == 0 or n < max(params.exact_fallback_n, 4):
        return exact_ed(a, b)

    with _phase(report, f"windows_L{L}"):
        ws = build_windows(n, Delta)
        wp = WindowedPair(a, b, ws)
        family = IntervalFamily(ws, params.eps, params.multipliers)

    inner = None
    if L - 1 >= 1 and ws.d >= max(params.exact_fallback_n, 4):
        windows = wp.windows

        def inner(x: int, y: int, Delta_q: int) -> int:
            return main(
                windows[x].tolist(), windows[y].tolist(), Delta_q, L - 1, params,
                _pair_seq(seq, L, x, y, Delta_q), report, threads=1,
            )

    memo = WindowDistances(wp, inner)
    with _phase(report, f"query_L{L}"):
        agg = aggregate_estimates(wp, family, Delta, L, params, seq, memo=memo, threads=threads)
    with _phase(report, f"window_dp_L{L}"):
        estimate = ed_from_estimates(ws, agg.estimates)

    lookups = agg.lookups
    budget = sum(r.budget for r in agg.rungs)
    over_budget = sum(r.stats.lookups > r.budget for r in agg.rungs)
    shrink_bad = sum(len(r.stats.shrink_violations) for r in agg.rungs)
    if report is not None:
        report.path = "approx"
        report.query_counts[L] = report.query_counts.get(L, 0) + lookups
        report.evaluations[L] = report.evaluations.get(L, 0) + memo.evaluations
        report.budgets[L] = report.budgets.get(L, 0) + budget
        report.big_cliques += sum(r.stats.big_cliques for r in agg.rungs)
        report.shrink_violations += shrink_bad
        report.budget_violations += over_budget
        if L == params.L_max:
            for r in agg.rungs:
                report.rungs.append({
                    "Delta_q": r.Delta_q,
                    "fold_value": r.value,
                    "edges": int(r.edges.sum()),
                    "lookups": r.stats.lookups,
                    "budget": r.budget,
                    "nodes": r.stats.nodes,
                })
                if report.keep_edges:
                    report.edge_sets.append((r.Delta_q, np.argwhere(r.edges).tolist()))
                for p, depth, size, nxt in sorted(r.stats.trace):
                    report.live_set_trace.append({
                        "level": L,
                        "Delta_q": r.Delta_q,
                        "path": list(p),
                        "depth": depth,
                        "live": size,
                        "next": nxt,
                    })
    if params.strict:
        # the budget presumes shrinkage, so report the shrink failure first
        if shrink_bad:
            raise ShrinkViolation(f"live set failed to shrink at level {L}")
        if over_budget:
            raise BudgetExceeded(f"query tree exceeded its lookup budget at level {L}")
    return estimate


def default_Delta(n: int, params: ParamSet) -> int:
    if n == 0:
        return 1
    if params.mode == "paper":
        return min(n, max(1, math.ceil(n ** (1 - float(params.eps_prime)))))
    return min(n, max(1, math.floor(n * params.Delta_fraction)))


def approx_ed(
    a: Sequence,
    b: Sequence,
    params: Optional[ParamSet] = None,
    *,
    Delta: Optional[int] = None,
    oracle: bool = False,
    threads: int = 1,
    keep_edges: bool = False,
) -> tuple[int, RunReport]:
    """Estimate ED(a, b) from above.

    Unequal inputs are cut to the shorter length and the length difference
    is added back, which keeps the estimate an upper bound.
    """
    params = params or derive_params()
    n = min(len(a), len(b))
    extra = abs(len(a) - len(b))
    a_cut, b_cut = a[:n], b[:n]
    Delta = default_Delta(n, params) if Delta is None else Delta
    report = RunReport(params.mode, n, str(params.delta), Delta, params.seed, keep_edges=keep_edges)
    seq = np.random.SeedSequence(params.seed)
    t0 = time.perf_counter()
    if n == 0:
        estimate = extra
    else:
        estimate = main(a_cut, b_cut, Delta, params.L_max, params, seq, report, threads=threads) + extra
    report.phase_times_ms["total"] = (time.perf_counter() - t0) * 1000
    report.estimate = estimate
    if oracle:
        t1 = time.perf_counter()
        report.true_distance = exact_ed(a, b)
        report.phase_times_ms["oracle"] = (time.perf_counter() - t1) * 1000
        report.sound = estimate >= report.true_distance
    return estimate, report


def run_summary(report: RunReport) -> dict[str, Any]:
    """A compact view for sweeps."""
    return {
        "estimate": report.estimate,
        "exact": report.true_distance,
        "queries": sum(report.query_counts.values()),
    }
