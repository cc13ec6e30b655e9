import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from edapprox.window_dp import brute_force_mapping_min, ed_from_estimates, new_estimates
from edapprox.windows import WindowSet


@st.composite
def instances(draw, max_a=5, max_b=8):
    d = draw(st.sampled_from([1, 2, 3, 4, 6, 8]))
    gamma = draw(st.sampled_from([g for g in range(1, d + 1) if d % g == 0]))
    m = draw(st.integers(1, max_a))
    ws = WindowSet(m * d, d, gamma, 1)
    if ws.k > max_b or ws.k < 1:
        ws = WindowSet(d, d, gamma, 1)
    E = draw(st.lists(st.integers(0, d), min_size=ws.m * ws.k, max_size=ws.m * ws.k))
    return ws, np.array(E, dtype=np.int64).reshape(ws.m, ws.k)


def test_single_pair():
    ws = WindowSet(4, 4, 4, 4)
    E = np.array([[2]])
    assert ed_from_estimates(ws, E) == 4 == brute_force_mapping_min(ws, E)


def test_trivial_matrix():
    ws = WindowSet(16, 4, 2, 8)
    E = new_estimates(ws)
    assert ed_from_estimates(ws, E) == 2 * ws.m * ws.d == brute_force_mapping_min(ws, E)


def test_perfect_tiling():
    ws = WindowSet(16, 4, 2, 8)
    E = new_estimates(ws)
    for a in range(ws.m):
        E[a, a * ws.s] = 0
    assert ed_from_estimates(ws, E) == 0 == brute_force_mapping_min(ws, E)


def test_empty_side():
    ws = WindowSet(0, 1, 1, 1)
    E = np.zeros((0, 0), dtype=np.int64)
    assert brute_force_mapping_min(ws, E) == 0 == ed_from_estimates(ws, E)


def test_images_are_distinct():
    # two A-windows that both only fit B-window 0: one of them must pay 2d
    ws = WindowSet(8, 4, 4, 1)
    E = np.array([[0, 4], [0, 4]])
    assert brute_force_mapping_min(ws, E) == ed_from_estimates(ws, E) == 2 * 4


def test_dimension_mismatch():
    ws = WindowSet(16, 4, 2, 8)
    with pytest.raises(ValueError):
        ed_from_estimates(ws, np.zeros((3, 3)))


def test_brute_force_budget():
    ws = WindowSet(64, 8, 1, 1)
    with pytest.raises(ValueError):
        brute_force_mapping_min(ws, new_estimates(ws))


@settings(max_examples=300, deadline=None)
@given(instances())
def test_matches_brute_force(inst):
    ws, E = inst
    assert ed_from_estimates(ws, E) == brute_force_mapping_min(ws, E)


@settings(max_examples=100, deadline=None)
@given(instances(), st.data())
def test_monotone_in_estimates(inst, data):
    ws, E = inst
    bump = np.array(data.draw(st.lists(st.integers(0, 3), min_size=E.size, max_size=E.size))).reshape(E.shape)
    assert ed_from_estimates(ws, E) <= ed_from_estimates(ws, E + bump)


@settings(max_examples=100, deadline=None)
@given(instances(), st.integers(1, 5), st.data())
def test_sandwich(inst, alpha, data):
    ws, exact = inst
    extra = np.array(data.draw(st.lists(st.integers(0, 100), min_size=exact.size, max_size=exact.size))).reshape(exact.shape)
    E = exact + (extra * (alpha - 1) * exact) // 100  # exact <= E <= alpha * exact
    lo = ed_from_estimates(ws, exact)
    assert lo <= ed_from_estimates(ws, E) <= alpha * lo


def test_large_instance_runs():
    # n = 4096 geometry: 64 x 1009 matrix, s = 16
    ws = WindowSet(4096, 64, 4, 256)
    rng = np.random.default_rng(0)
    E = rng.integers(0, 65, size=(ws.m, ws.k))
    v = ed_from_estimates(ws, E)
    assert 0 <= v <= 2 * ws.m * ws.d
