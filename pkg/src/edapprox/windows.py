"""Window decomposition, interval family, snapping and window mappings.

Window ids are global: A-windows are ``0 .. m-1`` and B-windows are
``m .. m+k-1``.  Start positions are 1-based, matching the usual string
indexing of the construction.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Literal, Optional, Sequence

import numpy as np

from .exact import EditScript, untouched_pairs

Side = Literal["A", "B"]


# -- window geometry ----------------------------------------------------------

@dataclass(frozen=True)
class WindowSet:
    n: int  # padded string length, a multiple of d
    d: int
    gamma: int
    Delta: int

    def __post_init__(self) -> None:
        if self.d < 1 or self.n % self.d:
            raise ValueError("n must be a positive multiple of d")
        if self.gamma < 1 or self.d % self.gamma:
            raise ValueError("gamma must divide d")

    @property
    def m(self) -> int:
        """Number of A-windows."""
        return self.n // self.d

    @property
    def k(self) -> int:
        """Number of B-windows."""
        return (self.n - self.d) // self.gamma + 1

    @property
    def t(self) -> int:
        return self.m + self.k

    @property
    def s(self) -> int:
        return self.d // self.gamma

    def a_start(self, i: int) -> int:
        return 1 + i * self.d

    def b_start(self, j: int) -> int:
        return 1 + j * self.gamma

    def start(self, wid: int) -> int:
        return self.a_start(wid) if wid < self.m else self.b_start(wid - self.m)

    def side(self, wid: int) -> Side:
        return "A" if wid < self.m else "B"

    def a_starts(self) -> np.ndarray:
        return 1 + self.d * np.arange(self.m)

    def b_starts(self) -> np.ndarray:
        return 1 + self.gamma * np.arange(self.k)


def pick_gamma(n: int, d: int, Delta: int) -> int:
    """Largest divisor of ``d`` not exceeding ``max(1, Delta*d/n)``."""
    target = max(1, (Delta * d) // n)
    return max(g for g in range(1, d + 1) if d % g == 0 and g <= target)


def build_windows(n: int, Delta: int) -> WindowSet:
    """Window geometry for strings of length ``n`` (padded up to a multiple of d)."""
    if n < 4:
        raise ValueError("windowing needs n >= 4")
    if not 1 <= Delta <= n:
        raise ValueError("Delta must lie in [1, n]")
    d = math.isqrt(n - 1) + 1
    padded = -(-n // d) * d
    return WindowSet(padded, d, pick_gamma(padded, d, Delta), Delta)


PAD = object()


def pad_to(seq: Sequence, n: int) -> list:
    """Right-pad with a sentinel that equals no alphabet symbol."""
    return list(seq) + [PAD] * (n - len(seq))


class WindowedPair:
    """A string pair cut into windows, with symbols encoded as small ints."""

    def __init__(self, a: Sequence, b: Sequence, ws: WindowSet):
        if len(a) != len(b) or len(a) > ws.n:
            raise ValueError("strings must have equal length at most ws.n")
        a, b = pad_to(a, ws.n), pad_to(b, ws.n)
        table: dict = {}
        self.a = np.fromiter((table.setdefault(c, len(table)) for c in a), dtype=np.int64, count=ws.n)
        self.b = np.fromiter((table.setdefault(c, len(table)) for c in b), dtype=np.int64, count=ws.n)
        self.alphabet_size = max(1, len(table))
        self.ws = ws
        rows = [self.a[i * ws.d:(i + 1) * ws.d] for i in range(ws.m)]
        rows += [self.b[j * ws.gamma:j * ws.gamma + ws.d] for j in range(ws.k)]
        self.windows = np.stack(rows)

    def window(self, wid: int) -> np.ndarray:
        return self.windows[wid]

    def exact_distance(self, x: int, y: int) -> int:
        from .exact import exact_ed

        return exact_ed(self.windows[x].tolist(), self.windows[y].tolist())


# -- snapping -----------------------------------------------------------------

def _floor_power(t: int, eps: Fraction, k: int) -> int:
    """floor(t ** (eps * k)) computed exactly."""
    p, q = (eps * k).numerator, (eps * k).denominator
    target = t**p
    r = int(math.floor(math.exp(math.log(t) * p / q)))
    while (r + 1) ** q <= target:
        r += 1
    while r > 0 and r**q > target:
        r -= 1
    return r


@lru_cache(maxsize=256)
def _ladder(t: int, eps: Fraction, limit: int) -> tuple[int, ...]:
    if t < 2:
        return tuple(range(1, limit + 1))
    step = float(eps) * math.log(t)
    if step <= 0.5 * math.log1p(1.0 / max(limit, 1)):
        # consecutive powers differ by less than one unit: every integer is hit
        return tuple(range(1, limit + 1))
    if 1 / eps > 100_000:
        raise ValueError("snap ladder too fine to enumerate")
    values = []
    k = 0
    while True:
        v = _floor_power(t, eps, k)
        if not values or v != values[-1]:
            values.append(v)
        if v >= limit:
            return tuple(values)
        k += 1


class SnapLadder:
    """Integer ladder ``floor(t ** (eps*k))``; snapping rounds down onto it."""

    def __init__(self, t: int, eps: Fraction, limit: int | None = None):
        self.t = t
        self.eps = Fraction(eps)
        self.values = _ladder(t, self.eps, max(t, limit or t, 1))
        self._arr = np.asarray(self.values, dtype=np.int64)

    def __call__(self, ell: int) -> int:
        if ell < 0:
            raise ValueError("snap of a negative count")
        if ell == 0:
            return 0
        if ell > self.values[-1]:
            return SnapLadder(self.t, self.eps, ell)(ell)
        return self.values[bisect.bisect_right(self.values, ell) - 1]

    def many(self, counts: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self._arr, counts, side="right") - 1
        out = self._arr[np.maximum(idx, 0)]
        return np.where(counts > 0, out, 0)

    def ratio_bound(self) -> float:
        """Supremum of ``x / snap(x)`` over ``1 <= x <= t``."""
        v = self.values
        ratios = [v[i + 1] / v[i] for i in range(len(v) - 1) if v[i] < self.t]
        return max(ratios, default=1.0)

    def rungs(self) -> list[int]:
        """Interval lengths ``1, t^eps, ..., t``."""
        out = [v for v in self.values if v < self.t]
        return out + [self.t]


def snap(ell: int, t: int, eps: Fraction) -> int:
    return SnapLadder(t, Fraction(eps), ell)(ell)


class IdentitySnap:
    """Snapping disabled (the fine-ladder limit); used for density arithmetic checks."""

    def __call__(self, ell: int) -> int:
        return ell

    def many(self, counts: np.ndarray) -> np.ndarray:
        return np.asarray(counts)

    def ratio_bound(self) -> float:
        return 1.0


# -- intervals ----------------------------------------------------------------

@dataclass(frozen=True)
class Interval:
    side: Side
    lo: int  # inclusive, index within the side
    hi: int  # inclusive
    base_length: int
    multiplier: int
    shift: int  # index of the centre base block

    def __len__(self) -> int:
        return self.hi - self.lo + 1

    def __contains__(self, idx: int) -> bool:
        return self.lo <= idx <= self.hi


def scaled_interval(side: Side, side_len: int, length: int, q: int, lam: int) -> Interval | None:
    """``lam * I`` for the base block ``q`` of the given length, truncated to the side."""
    half = (lam - 1) // 2
    lo = max(0, (q - half) * length)
    hi = min(side_len, (q + half + 1) * length) - 1
    if lo > hi:
        return None
    return Interval(side, lo, hi, length, lam, q)


class IntervalFamily:
    """Intervals of every rung length, per side and multiplier.

    ``multiplier 1`` gives the disjoint covers.  Larger multipliers include
    the centres that fall off the boundary, so every window lies in exactly
    ``lam`` scaled intervals of a rung, one per shift residue.
    """

    def __init__(self, ws: WindowSet, eps: Fraction, multipliers: Iterable[int] = (1, 7, 49)):
        self.ws = ws
        self.ladder = SnapLadder(ws.t, Fraction(eps))
        self.lengths = self.ladder.rungs()
        self.multipliers = tuple(multipliers)
        self.side_len = {"A": ws.m, "B": ws.k}
        self.offset = {"A": 0, "B": ws.m}
        self._scan = self._scan_arrays(7)

    def base(self, side: Side, length: int) -> list[Interval]:
        n = self.side_len[side]
        return [scaled_interval(side, n, length, q, 1) for q in range(-(-n // length))]

    def scaled(self, side: Side, length: int, lam: int) -> list[Interval]:
        n = self.side_len[side]
        half = (lam - 1) // 2
        blocks = -(-n // length)
        out = []
        for q in range(-half, blocks + half):
            iv = scaled_interval(side, n, length, q, lam)
            if iv is not None:
                out.append(iv)
        return out

    def __iter__(self) -> Iterator[Interval]:
        for side in ("A", "B"):
            for length in self.lengths:
                for lam in self.multipliers:
                    yield from self.scaled(side, length, lam)

    def _scan_arrays(self, lam: int) -> tuple[np.ndarray, np.ndarray]:
        """Global [lo, hi) of ``lam * I`` for every base interval I."""
        lo, hi = [], []
        for side in ("A", "B"):
            off, n = self.offset[side], self.side_len[side]
            for length in self.lengths:
                for q in range(-(-n // length)):
                    iv = scaled_interval(side, n, length, q, lam)
                    lo.append(off + iv.lo)
                    hi.append(off + iv.hi + 1)
        return np.asarray(lo, dtype=np.int64), np.asarray(hi, dtype=np.int64)

    @property
    def scan(self) -> tuple[np.ndarray, np.ndarray]:
        return self._scan

    def global_range(self, iv: Interval) -> tuple[int, int]:
        off = self.offset[iv.side]
        return off + iv.lo, off + iv.hi + 1


def build_interval_family(ws: WindowSet, eps: Fraction, multipliers: Iterable[int] = (1, 7, 49)) -> IntervalFamily:
    return IntervalFamily(ws, eps, multipliers)


# -- mappings -----------------------------------------------------------------

@dataclass(frozen=True)
class WindowMapping:
    """Partial map from A-window index to B-window index (``None`` is deletion)."""

    images: tuple[Optional[int], ...]

    @classmethod
    def empty(cls, m: int) -> "WindowMapping":
        return cls((None,) * m)

    @classmethod
    def from_pairs(cls, m: int, pairs: Iterable[tuple[int, int]]) -> "WindowMapping":
        images: list[Optional[int]] = [None] * m
        for a, b in pairs:
            images[a] = b
        return cls(tuple(images))

    def pairs(self) -> list[tuple[int, int]]:
        return [(a, b) for a, b in enumerate(self.images) if b is not None]

    def __len__(self) -> int:
        return sum(b is not None for b in self.images)

    def is_monotone(self) -> bool:
        imgs = [b for b in self.images if b is not None]
        return all(x < y for x, y in zip(imgs, imgs[1:]))

    def restrict(self, keep: Callable[[int], bool]) -> "WindowMapping":
        return WindowMapping(tuple(b if b is not None and keep(a) else None for a, b in enumerate(self.images)))


def mapping_cost(mu: WindowMapping, ws: WindowSet, dist: Callable[[int, int], int]) -> int:
    """Twice the window distances plus twice the overlap/gap penalties.

    ``dist(a, b)`` takes side-local indices; deleted A-windows cost ``d``.
    """
    if len(mu.images) != ws.m:
        raise ValueError("mapping size does not match the window set")
    if not mu.is_monotone():
        raise ValueError("mapping is not monotone")
    total = 0
    prev: Optional[int] = None
    for a, b in enumerate(mu.images):
        if b is None:
            total += 2 * ws.d
            continue
        total += 2 * dist(a, b)
        if prev is not None:
            total += 2 * abs(ws.b_start(prev) + ws.d - ws.b_start(b))
        prev = b
    return total


def skew(mu: WindowMapping, ws: WindowSet) -> Fraction:
    """Smallest D with (1/D)|sa1 - sa2| <= |sb1 - sb2| <= D|sa1 - sa2| over mapped pairs."""
    pairs = mu.pairs()
    worst = Fraction(1)
    for i in range(len(pairs)):
        a1, b1 = pairs[i]
        for a2, b2 in pairs[i + 1:]:
            da = abs(ws.a_start(a2) - ws.a_start(a1))
            db = abs(ws.b_start(b2) - ws.b_start(b1))
            worst = max(worst, Fraction(db, da), Fraction(da, db))
    return worst


def _violates(ws: WindowSet, a1: int, b1: int, a2: int, b2: int, D: int) -> bool:
    da = abs(ws.a_start(a2) - ws.a_start(a1))
    db = abs(ws.b_start(b2) - ws.b_start(b1))
    return da > D * db or db > D * da


def reduce_skew(mu: WindowMapping, ws: WindowSet) -> WindowMapping:
    """Drop windows so the remaining mapping has skew at most 2.

    Repeatedly pick a maximal violating pair (no other remaining violating
    pair spans it), discard the pairs that overlap it, and finally delete
    every window from each chosen pair's left end up to (excluding) its
    right end.
    """
    pairs = mu.pairs()
    violating = [
        (pairs[i][0], pairs[j][0])
        for i in range(len(pairs))
        for j in range(i + 1, len(pairs))
        if _violates(ws, *pairs[i], *pairs[j], 2)
    ]
    chosen: list[tuple[int, int]] = []
    remaining = violating
    while remaining:
        maximal = [
            p for p in remaining
            if not any(o != p and o[0] <= p[0] and p[1] <= o[1] for o in remaining)
        ]
        pick = min(maximal)
        chosen.append(pick)
        remaining = [p for p in remaining if p[1] <= pick[0] or pick[1] <= p[0]]
        remaining = [p for p in remaining if p != pick]
    doomed = set()
    for lo, hi in chosen:
        doomed.update(range(lo, hi))
    return mu.restrict(lambda a: a not in doomed)


def window_matching_from_alignment(script: EditScript, ws: WindowSet) -> WindowMapping:
    """Window mapping induced by an A-to-B edit script on the padded strings.

    Each A-window goes to the rightmost B-window holding the image of its
    first untouched character, or to ``None`` if all its characters were
    edited.  A window whose image repeats the previous one is dropped, which
    never raises the mapping cost.
    """
    first_image: dict[int, int] = {}
    for src, dst in untouched_pairs(range(ws.n), script):
        first_image.setdefault(src // ws.d, dst + 1)
    images: list[Optional[int]] = []
    last = None
    for a in range(ws.m):
        pos = first_image.get(a)
        if pos is None:
            images.append(None)
            continue
        j = min((pos - 1) // ws.gamma, ws.k - 1)
        if j == last:
            images.append(None)
            continue
        images.append(j)
        last = j
    return WindowMapping(tuple(images))


def matching_cost_bound(ed: int, ws: WindowSet) -> int:
    """16 ED + 12 (n/d) gamma + 4 d."""
    return 16 * ed + 12 * ws.m * ws.gamma + 4 * ws.d
