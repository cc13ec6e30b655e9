import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import planted_pair
from edapprox.exact import EditOp, EditScript, exact_alignment, exact_ed
from edapprox.windows import (
    PAD,
    IntervalFamily,
    SnapLadder,
    WindowedPair,
    WindowMapping,
    WindowSet,
    build_windows,
    matching_cost_bound,
    mapping_cost,
    pad_to,
    reduce_skew,
    skew,
    snap,
    window_matching_from_alignment,
)

# -- geometry ----------------------------------------------------------------------


def test_sixteen_delta_eight():
    ws = build_windows(16, 8)
    assert (ws.d, ws.gamma, ws.m, ws.k, ws.t) == (4, 2, 4, 7, 11)


def test_sixteen_delta_sixteen():
    ws = build_windows(16, 16)
    assert (ws.gamma, ws.k) == (4, 4)
    # 1 + n/d + (n - d)/gamma = 1 + 4 + 3
    assert ws.t == 8 == 1 + ws.n // ws.d + (ws.n - ws.d) // ws.gamma


def test_gamma_equal_d_gives_equal_spacing():
    ws = build_windows(25, 25)
    assert ws.gamma == ws.d == 5
    assert ws.a_starts().tolist() == ws.b_starts().tolist()


def test_small_n_rejected():
    with pytest.raises(ValueError):
        build_windows(3, 1)
    with pytest.raises(ValueError):
        build_windows(16, 0)
    with pytest.raises(ValueError):
        build_windows(16, 17)


@given(st.integers(4, 3000), st.data())
def test_geometry_invariants(n, data):
    Delta = data.draw(st.integers(1, n))
    ws = build_windows(n, Delta)
    assert ws.d * ws.d >= n and (ws.d - 1) ** 2 < n
    assert ws.n % ws.d == 0 and ws.n >= n and ws.n - n < ws.d
    assert ws.d % ws.gamma == 0 and 1 <= ws.gamma <= max(1, Delta * ws.d // ws.n)
    a = ws.a_starts()
    assert a[0] == 1 and np.all(np.diff(a) == ws.d) and a[-1] + ws.d - 1 == ws.n
    b = ws.b_starts()
    assert b[0] == 1 and np.all(np.diff(b) == ws.gamma) and b[-1] == ws.n - ws.d + 1
    assert ws.t == 1 + ws.n // ws.d + (ws.n - ws.d) // ws.gamma


def test_padding_keeps_distance():
    r = random.Random(2)
    a = [r.randrange(3) for _ in range(31)]
    b = [r.randrange(3) for _ in range(31)]
    ws = build_windows(31, 5)
    assert ws.n == 36
    assert exact_ed(pad_to(a, ws.n), pad_to(b, ws.n)) == exact_ed(a, b)
    assert pad_to(a, ws.n)[-1] is PAD


def test_windowed_pair_slices():
    a, b = "abcdefghijklmnop", "ABCDEFGHIJKLMNOP"
    ws = build_windows(16, 8)
    wp = WindowedPair(a, b, ws)
    assert wp.windows.shape == (ws.t, ws.d)
    assert wp.exact_distance(0, ws.m) == 4
    # B-window 1 starts at position 3 of b
    assert wp.exact_distance(ws.m + 1, ws.m + 2) == 4
    assert WindowedPair(a, a, ws).exact_distance(1, ws.m + 2) == 0


# -- snapping ------------------------------------------------------------------------


def test_snap_examples():
    half = Fraction(1, 2)
    assert snap(0, 16, half) == 0
    assert snap(5, 16, half) == 4
    assert snap(16, 16, half) == 16
    assert snap(3, 16, half) == 1


def test_snap_rejects_negative():
    with pytest.raises(ValueError):
        SnapLadder(16, Fraction(1, 2))(-1)


def test_snap_beyond_t_extends_ladder():
    assert snap(100, 16, Fraction(1, 2)) == 64


@given(st.integers(2, 5000), st.sampled_from([Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 8)]), st.data())
def test_snap_properties(t, eps, data):
    ladder = SnapLadder(t, eps)
    ell = data.draw(st.integers(1, t))
    s = ladder(ell)
    assert 1 <= s <= ell
    assert ladder(s) == s
    # s is the floor of some power t^(eps k)
    assert s in ladder.values
    distinct = {ladder(x) for x in range(1, t + 1)} if t <= 600 else set(ladder.values) & set(range(1, t + 1))
    assert len(distinct) <= 2 / eps
    assert ell / s < ladder.ratio_bound() + 1e-12 or ell == s


def test_snap_fine_ladder_is_identity():
    ladder = SnapLadder(1000, Fraction(1, 200**12))
    assert ladder.values == tuple(range(1, 1001))
    assert ladder(777) == 777


def test_snap_vectorised_matches_scalar():
    ladder = SnapLadder(300, Fraction(1, 3))
    xs = np.arange(0, 301)
    assert ladder.many(xs).tolist() == [ladder(int(x)) for x in xs]


def test_stability_of_monotone_sequences():
    r = random.Random(12)
    for _ in range(1000):
        t = r.randrange(2, 400)
        eps = r.choice([Fraction(1, 2), Fraction(1, 3), Fraction(1, 4), Fraction(1, 6)])
        ladder = SnapLadder(t, eps)
        seq = sorted(r.randrange(0, t + 1) for _ in range(r.randrange(5, 120)))
        if r.random() < 0.5:
            seq.reverse()
        snapped = [ladder(x) for x in seq]
        bad = sum(
            1 for i in range(2, len(seq) - 2)
            if len(set(snapped[i - 2:i + 3])) > 1
        )
        assert bad <= 10 / eps


# -- intervals -------------------------------------------------------------------------


def test_rungs_for_sixteen():
    ws = WindowSet(16 * 4, 4, 4, 4)  # 16 A-windows and 16 B-windows, t = 32
    fam = IntervalFamily(ws, Fraction(1, 2))
    assert SnapLadder(16, Fraction(1, 2)).rungs() == [1, 4, 16]
    assert fam.lengths == SnapLadder(ws.t, Fraction(1, 2)).rungs()


def test_top_rung_is_whole_side():
    ws = build_windows(256, 32)
    fam = IntervalFamily(ws, Fraction(1, 4))
    assert fam.lengths[-1] == ws.t
    for side in ("A", "B"):
        (iv,) = fam.base(side, ws.t)
        assert (iv.lo, iv.hi) == (0, fam.side_len[side] - 1)


@pytest.mark.parametrize("n,Delta,eps", [(256, 32, Fraction(1, 4)), (400, 9, Fraction(1, 3)), (100, 100, Fraction(1, 2))])
def test_interval_cover_counts(n, Delta, eps):
    ws = build_windows(n, Delta)
    fam = IntervalFamily(ws, eps, (1, 7, 49))
    for side in ("A", "B"):
        size = fam.side_len[side]
        for length in fam.lengths:
            base = fam.base(side, length)
            hits = np.zeros(size, dtype=int)
            for iv in base:
                hits[iv.lo:iv.hi + 1] += 1
            assert np.all(hits == 1)
            for lam in (7, 49):
                scaled = fam.scaled(side, length, lam)
                for residue in range(lam):
                    hits = np.zeros(size, dtype=int)
                    for iv in scaled:
                        if iv.shift % lam == residue:
                            hits[iv.lo:iv.hi + 1] += 1
                    assert np.all(hits == 1)
                total = np.zeros(size, dtype=int)
                for iv in scaled:
                    assert len(iv) <= lam * length
                    total[iv.lo:iv.hi + 1] += 1
                    q = iv.shift
                    if 0 <= q and (q + 1) * length <= size:
                        # a full base block inside the side: lam*I contains I
                        assert iv.lo <= q * length and (q + 1) * length - 1 <= iv.hi
                assert np.all(total == lam)


def test_scan_arrays_are_seven_scaled_base_intervals():
    ws = build_windows(144, 24)
    fam = IntervalFamily(ws, Fraction(1, 2))
    lo, hi = fam.scan
    expect = []
    for side in ("A", "B"):
        for length in fam.lengths:
            for iv in fam.base(side, length):
                seven = [s for s in fam.scaled(side, length, 7) if s.shift == iv.shift]
                expect.append(fam.global_range(seven[0]))
    assert list(zip(lo.tolist(), hi.tolist())) == expect


def test_family_iterates_every_multiplier():
    ws = build_windows(64, 16)
    fam = IntervalFamily(ws, Fraction(1, 2))
    assert {iv.multiplier for iv in fam} == {1, 7, 49}


# -- mappings ---------------------------------------------------------------------------

WS16 = WindowSet(16, 4, 2, 8)


def zero(a, b):
    return 0


def test_all_deleted_cost():
    assert mapping_cost(WindowMapping.empty(WS16.m), WS16, zero) == 2 * WS16.m * WS16.d


def test_tiling_pairs_have_no_gap():
    # b-starts 1 and 5 are B-windows 0 and 2; a3 and a4 are deleted (2d each)
    mu = WindowMapping.from_pairs(4, [(0, 0), (1, 2)])
    assert mapping_cost(mu, WS16, zero) == 2 * 2 * 4
    two = WindowSet(8, 4, 2, 4)
    assert mapping_cost(WindowMapping.from_pairs(2, [(0, 0), (1, 2)]), two, zero) == 0


def test_gap_penalty():
    # b-start 7 is B-window 3: gap |1 + 4 - 7| = 2 counted twice
    mu = WindowMapping.from_pairs(4, [(0, 0), (1, 3)])
    assert mapping_cost(mu, WS16, zero) == 4 + 16
    assert mapping_cost(mu, WS16, lambda a, b: 1) == 4 + 16 + 4


def test_cost_rejects_non_monotone():
    with pytest.raises(ValueError):
        mapping_cost(WindowMapping.from_pairs(4, [(0, 3), (1, 1)]), WS16, zero)
    with pytest.raises(ValueError):
        mapping_cost(WindowMapping.from_pairs(4, [(0, 2), (1, 2)]), WS16, zero)
    with pytest.raises(ValueError):
        mapping_cost(WindowMapping.empty(3), WS16, zero)


def test_skew_examples():
    assert skew(WindowMapping.from_pairs(4, [(2, 3)]), WS16) == 1
    assert skew(WindowMapping.from_pairs(4, [(0, 0), (1, 2)]), WS16) == 1
    # a-starts (1, 5) and b-starts (1, 13): ratio 12/4
    assert skew(WindowMapping.from_pairs(4, [(0, 0), (1, 6)]), WS16) == 3


def test_reduce_skew_examples():
    low = WindowMapping.from_pairs(4, [(0, 0), (1, 2), (2, 4)])
    assert reduce_skew(low, WS16) == low
    empty = WindowMapping.empty(4)
    assert reduce_skew(empty, WS16) == empty
    high = WindowMapping.from_pairs(4, [(0, 0), (1, 6)])
    out = reduce_skew(high, WS16)
    assert len(out) < len(high)
    assert skew(out, WS16) <= 2


def random_mapping(ws, r, force_skew=False):
    cnt = r.randint(0, min(ws.m, ws.k))
    if force_skew:
        cnt = max(cnt, 2)
    a = sorted(r.sample(range(ws.m), cnt))
    b = sorted(r.sample(range(ws.k), cnt))
    return WindowMapping.from_pairs(ws.m, zip(a, b))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_reduce_skew_postconditions(seed):
    r = random.Random(seed)
    n = r.randint(16, 200)
    a, b = planted_pair(n, r.random(), 3, r)
    ws = build_windows(n, r.randint(1, n))
    wp = WindowedPair(a, b, ws)
    mu = random_mapping(ws, r, force_skew=True)
    dist = lambda x, y: wp.exact_distance(x, ws.m + y)  # noqa: E731
    out = reduce_skew(mu, ws)
    assert set(out.pairs()) <= set(mu.pairs())
    assert skew(out, ws) <= 2
    assert mapping_cost(out, ws, dist) <= 9 * mapping_cost(mu, ws, dist)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10**9))
def test_random_mappings_never_beat_true_distance(seed):
    r = random.Random(seed)
    n = r.randint(8, 160)
    a, b = planted_pair(n, r.random(), r.choice([2, 4]), r)
    ws = build_windows(n, r.randint(1, n))
    wp = WindowedPair(a, b, ws)
    mu = random_mapping(ws, r)
    assert mapping_cost(mu, ws, lambda x, y: wp.exact_distance(x, ws.m + y)) >= exact_ed(a, b)


# -- matching from an alignment ----------------------------------------------------------


def test_identity_alignment_maps_to_twins():
    r = random.Random(1)
    a = [r.randrange(4) for _ in range(64)]
    ws = build_windows(64, 16)
    mu = window_matching_from_alignment(EditScript(), ws)
    assert mu.images == tuple(i * ws.s for i in range(ws.m))
    wp = WindowedPair(a, a, ws)
    assert mapping_cost(mu, ws, lambda x, y: wp.exact_distance(x, ws.m + y)) == 0


def test_deleted_window_maps_to_none():
    ws = build_windows(16, 8)
    # delete the four characters of the second A-window, then re-insert four at the end
    ops = tuple(EditOp("delete", 5) for _ in range(4)) + tuple(EditOp("insert", 13, "z") for _ in range(4))
    mu = window_matching_from_alignment(EditScript(ops), ws)
    assert mu.images[1] is None
    assert mu.images[0] == 0


def test_planted_pair_bound():
    r = random.Random(256)
    a, b = planted_pair(256, 0.1, 4, r)
    ws = build_windows(256, 32)
    wp = WindowedPair(a, b, ws)
    script = exact_alignment(pad_to(a, ws.n), pad_to(b, ws.n))
    mu = window_matching_from_alignment(script, ws)
    assert mu.is_monotone()
    cost = mapping_cost(mu, ws, lambda x, y: wp.exact_distance(x, ws.m + y))
    ed = exact_ed(a, b)
    assert ed <= cost <= 16 * ed + 12 * ws.m * ws.gamma + 4 * ws.d == matching_cost_bound(ed, ws)
