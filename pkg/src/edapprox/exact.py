"""Exact edit distance: bit-parallel distance, banded cutoff and alignment.

All three operations use unit costs for insertion, deletion and
substitution.  Inputs may be ``str``, ``bytes`` or any sequence of
hashable symbols.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Iterable, Literal, Sequence

import numpy as np

DEFAULT_ALIGNMENT_CAP = 4096

OpKind = Literal["insert", "delete", "substitute"]


@dataclass(frozen=True)
class EditOp:
    kind: OpKind
    position: int  # 1-based index into the string as it is when the op applies
    char: Hashable = None


@dataclass(frozen=True)
class EditScript:
    """Ordered edit operations turning ``a`` into ``b``.

    Ops are applied in list order.  ``exact_alignment`` emits them right to
    left so every position also equals the index in the original ``a``.
    """

    ops: tuple[EditOp, ...] = field(default_factory=tuple)

    def __len__(self) -> int:
        return len(self.ops)

    def __iter__(self):
        return iter(self.ops)

    def apply(self, a: Sequence) -> list:
        return apply_script(a, self)


def apply_script(a: Sequence, script: EditScript | Iterable[EditOp]) -> list:
    """Replay ``script`` on ``a`` and return the resulting symbol list."""
    out = list(a)
    for op in script:
        p = op.position - 1
        if op.kind == "insert":
            if not 0 <= p <= len(out):
                raise ValueError(f"insert position {op.position} out of range")
            out.insert(p, op.char)
        elif op.kind == "delete":
            if not 0 <= p < len(out):
                raise ValueError(f"delete position {op.position} out of range")
            del out[p]
        elif op.kind == "substitute":
            if not 0 <= p < len(out):
                raise ValueError(f"substitute position {op.position} out of range")
            out[p] = op.char
        else:
            raise ValueError(f"unknown edit kind {op.kind!r}")
    return out


def exact_ed(a: Sequence, b: Sequence) -> int:
    """Edit distance via Hyyrö's variant of Myers' bit-vector algorithm.

    The shorter string becomes the bit pattern, so the work is
    O(len(long) * len(short) / wordsize) big-int operations.
    """
    if len(a) > len(b):
        a, b = b, a
    m = len(a)
    if m == 0:
        return len(b)
    peq: dict = {}
    for i, ch in enumerate(a):
        peq[ch] = peq.get(ch, 0) | (1 << i)
    mask = (1 << m) - 1
    top = 1 << (m - 1)
    vp, vn, score = mask, 0, m
    for ch in b:
        eq = peq.get(ch, 0)
        xv = eq | vn
        xh = (((eq & vp) + vp) ^ vp) | eq
        hp = vn | (~(xh | vp) & mask)
        hn = vp & xh
        if hp & top:
            score += 1
        elif hn & top:
            score -= 1
        hp = ((hp << 1) | 1) & mask
        hn = (hn << 1) & mask
        vp = hn | (~(xv | hp) & mask)
        vn = hp & xv
    return score


def banded_ed(a: Sequence, b: Sequence, cap: int) -> int | None:
    """Ukkonen cutoff DP: the exact distance if it is at most ``cap``, else ``None``.

    Only cells with ``|i - j| <= cap`` are evaluated and the scan stops as
    soon as a whole band row exceeds ``cap``.
    """
    if cap < 0:
        raise ValueError("cap must be non-negative")
    n, m = len(a), len(b)
    if abs(n - m) > cap:
        return None
    over = cap + 1
    prev = {j: j for j in range(0, min(m, cap) + 1)}
    for i in range(1, n + 1):
        lo, hi = max(0, i - cap), min(m, i + cap)
        cur = {}
        best = over
        ai = a[i - 1]
        for j in range(lo, hi + 1):
            if j == 0:
                v = i
            else:
                v = prev.get(j - 1, over) + (ai != b[j - 1])
                up = prev.get(j, over) + 1
                left = cur.get(j - 1, over) + 1
                if up < v:
                    v = up
                if left < v:
                    v = left
            if v > over:
                v = over
            cur[j] = v
            if v < best:
                best = v
        if best > cap:
            return None
        prev = cur
    result = prev.get(m, over)
    return result if result <= cap else None


def _encode_pair(a: Sequence, b: Sequence) -> tuple[np.ndarray, np.ndarray]:
    table: dict = {}
    ca = np.fromiter((table.setdefault(ch, len(table)) for ch in a), dtype=np.int64, count=len(a))
    cb = np.fromiter((table.setdefault(ch, len(table)) for ch in b), dtype=np.int64, count=len(b))
    return ca, cb


def dp_table(a: Sequence, b: Sequence) -> np.ndarray:
    """Full Wagner-Fischer table, one numpy row at a time.

    Insertions are resolved per row with a running minimum:
    ``D[i, j] = j + min_{k<=j}(base[k] - k)``.
    """
    ca, cb = _encode_pair(a, b)
    n, m = len(ca), len(cb)
    table = np.empty((n + 1, m + 1), dtype=np.int32)
    cols = np.arange(m + 1, dtype=np.int32)
    table[0] = cols
    for i in range(1, n + 1):
        prev = table[i - 1]
        base = np.empty(m + 1, dtype=np.int32)
        base[0] = i
        base[1:] = np.minimum(prev[:-1] + (cb != ca[i - 1]), prev[1:] + 1)
        table[i] = np.minimum.accumulate(base - cols) + cols
    return table


def exact_alignment(a: Sequence, b: Sequence, *, max_len: int = DEFAULT_ALIGNMENT_CAP) -> EditScript:
    """Optimal edit script from a full-table trace-back.

    Ties break substitute (or match) before delete before insert.  The full
    table is kept, so inputs longer than ``max_len`` are rejected.
    """
    if max(len(a), len(b)) > max_len:
        raise ValueError(f"alignment limited to strings of length <= {max_len}")
    table = dp_table(a, b)
    ops: list[EditOp] = []
    i, j = len(a), len(b)
    while i > 0 or j > 0:
        cur = table[i, j]
        if i > 0 and j > 0:
            same = a[i - 1] == b[j - 1]
            if table[i - 1, j - 1] + (0 if same else 1) == cur:
                if not same:
                    ops.append(EditOp("substitute", i, b[j - 1]))
                i, j = i - 1, j - 1
                continue
        if i > 0 and table[i - 1, j] + 1 == cur:
            ops.append(EditOp("delete", i))
            i -= 1
            continue
        ops.append(EditOp("insert", i + 1, b[j - 1]))
        j -= 1
    return EditScript(tuple(ops))


def untouched_pairs(a: Sequence, script: EditScript) -> list[tuple[int, int]]:
    """0-based (index in a, index in b) pairs for characters no op touched."""
    tags: list[int | None] = list(range(len(a)))
    for op in script:
        p = op.position - 1
        if op.kind == "insert":
            tags.insert(p, None)
        elif op.kind == "delete":
            del tags[p]
        else:
            tags[p] = None
    return [(src, dst) for dst, src in enumerate(tags) if src is not None]


# -- batched distances for short windows -------------------------------------

def batch_myers64(peq: np.ndarray, pattern_len: int, pattern_ids: np.ndarray, texts: np.ndarray) -> np.ndarray:
    """Vectorised global edit distance for patterns of length <= 64.

    ``peq[p, c]`` is the match bitmask of pattern ``p`` for symbol code
    ``c``; ``texts`` is an (N, L) array of symbol codes compared against
    patterns ``pattern_ids`` (length N).
    """
    if not 1 <= pattern_len <= 64:
        raise ValueError("pattern length must be in [1, 64]")
    count = len(pattern_ids)
    mask = np.uint64((1 << pattern_len) - 1)
    top = np.uint64(1 << (pattern_len - 1))
    one = np.uint64(1)
    vp = np.full(count, mask, dtype=np.uint64)
    vn = np.zeros(count, dtype=np.uint64)
    score = np.full(count, pattern_len, dtype=np.int64)
    rows = peq[pattern_ids]
    idx = np.arange(count)
    with np.errstate(over="ignore"):
        for col in range(texts.shape[1]):
            eq = rows[idx, texts[:, col]]
            xv = eq | vn
            xh = (((eq & vp) + vp) ^ vp) | eq
            hp = vn | (~(xh | vp) & mask)
            hn = vp & xh
            score += (hp & top) != 0
            score -= (hn & top) != 0
            hp = ((hp << one) | one) & mask
            hn = (hn << one) & mask
            vp = hn | (~(xv | hp) & mask)
            vn = hp & xv
    return score


def build_peq(windows: np.ndarray, alphabet_size: int) -> np.ndarray:
    """Match bitmasks for each row of ``windows`` (shape (W, d), d <= 64)."""
    count, width = windows.shape
    peq = np.zeros((count, alphabet_size), dtype=np.uint64)
    rows = np.arange(count)
    for i in range(width):
        peq[rows, windows[:, i]] |= np.uint64(1 << i)
    return peq
