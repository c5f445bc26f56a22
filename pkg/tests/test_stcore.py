import numpy as np
import pytest

from sgf import _kernels
from sgf.errors import GeometryError
from sgf.stcore import (
    STCoreParams,
    STRONG_PARAMS,
    WEAK_PARAMS,
    st_filter,
    st_spatial_stage,
    st_temporal_stage,
)


def brute_force_filter(stack, delta_s, theta_s, delta_t, theta_t):
    """Direct two-stage evaluation by exhaustive summation (the oracle)."""
    t_frames, h, w = stack.shape
    spatial = np.zeros((t_frames, h, w), dtype=int)
    for t in range(t_frames):
        for y in range(h):
            for x in range(w):
                total = 0
                for dy in range(delta_s + 1):
                    for dx in range(delta_s + 1):
                        if y + dy < h and x + dx < w:
                            total += abs(int(stack[t, y + dy, x + dx]))
                spatial[t, y, x] = 1 if total >= theta_s else 0
    out = np.zeros((t_frames, h, w), dtype=int)
    for t in range(delta_t - 1, t_frames):
        for y in range(h):
            for x in range(w):
                acc = sum(spatial[k, y, x] for k in range(t - delta_t + 1, t + 1))
                out[t, y, x] = 1 if acc >= theta_t else 0
    return out


def test_spatial_zero_frame():
    out = st_spatial_stage(np.zeros((6, 6), dtype=int), 1, 1)
    assert out.sum() == 0


def test_spatial_single_event_window_coverage():
    # brute-force window enumeration: pixels whose anchored window covers
    # the event fire with (delta_s, theta_s) = (1, 1)
    grid = np.zeros((6, 6), dtype=int)
    grid[3, 4] = 1
    out = st_spatial_stage(grid, 1, 1)
    expect = np.zeros((6, 6), dtype=int)
    for y in range(6):
        for x in range(6):
            if y <= 3 <= y + 1 and x <= 4 <= x + 1:
                expect[y, x] = 1
    assert np.array_equal(out, expect)


def test_spatial_dense_cluster_threshold():
    # dense 3x3 cluster of 9 events: with the anchored window reading a
    # (delta_s+1)-square holds at most (delta_s+1)^2 of them, so theta_s=5
    # needs delta_s=2; cluster anchor fires, far corners stay silent.
    grid = np.zeros((8, 8), dtype=int)
    grid[3:6, 3:6] = 1
    out = st_spatial_stage(grid, 1, 5)
    assert np.array_equal(
        np.stack([out]), brute_force_filter(np.stack([grid]), 1, 5, 1, 1)
    )
    assert out.sum() == 0  # 2x2 windows top out at 4 events
    out = st_spatial_stage(grid, 2, 5)
    assert out[3, 3] == 1
    assert out[0, 0] == 0
    assert out[7, 7] == 0


def test_temporal_flicker_suppressed():
    # hand-traced: single-frame flicker under (1,1,2,2) dies at stage two
    a = np.zeros((4, 4), dtype=int)
    b = a.copy()
    b[2, 2] = 1
    out = st_filter([a, b, a, a], STCoreParams(1, 1, 2, 2))
    assert all(frame.sum() == 0 for frame in out)


def test_temporal_persistent_pixel_fires():
    grid = np.zeros((4, 4), dtype=int)
    grid[1, 1] = 1
    frames = [grid] * 6
    out = st_filter(frames, STCoreParams(1, 1, 6, 5))
    assert out[5][1, 1] == 1
    assert out[4].sum() == 0  # warm-up


def test_temporal_degenerate_window_is_identity():
    rng = np.random.Generator(np.random.Philox(key=1))
    frames = [rng.integers(0, 3, (5, 5)) for _ in range(4)]
    out = st_filter(frames, STCoreParams(1, 2, 1, 1))
    for frame, got in zip(frames, out):
        assert np.array_equal(got, st_spatial_stage(frame, 1, 2))


def test_temporal_stage_window_sum():
    a = np.zeros((3, 3), dtype=int)
    a[0, 0] = 1
    out = st_temporal_stage([a, a, np.zeros((3, 3), int)], 2)
    assert out[0, 0] == 1
    assert out.sum() == 1


def test_brute_force_equivalence_random_instances():
    rng = np.random.Generator(np.random.Philox(key=42))
    for _ in range(60):
        stack = rng.integers(0, 3, (4, 8, 8))
        delta_s = int(rng.integers(0, 3))
        theta_s = int(rng.integers(1, 5))
        delta_t = int(rng.integers(1, 5))
        theta_t = int(rng.integers(1, 5))
        got = st_filter(list(stack), STCoreParams(delta_s, theta_s, delta_t, theta_t))
        want = brute_force_filter(stack, delta_s, theta_s, delta_t, theta_t)
        assert np.array_equal(np.stack(got), want)


def test_threshold_monotonicity():
    rng = np.random.Generator(np.random.Philox(key=7))
    stack = rng.integers(0, 3, (5, 8, 8))
    base = np.stack(st_filter(list(stack), STCoreParams(1, 2, 2, 2)))
    higher_s = np.stack(st_filter(list(stack), STCoreParams(1, 3, 2, 2)))
    higher_t = np.stack(st_filter(list(stack), STCoreParams(1, 2, 2, 3)))
    assert np.all(higher_s <= base)
    assert np.all(higher_t <= base)


def test_outputs_are_binary():
    rng = np.random.Generator(np.random.Philox(key=8))
    stack = rng.integers(0, 5, (4, 6, 6))
    out = np.stack(st_filter(list(stack), WEAK_PARAMS))
    assert set(np.unique(out)) <= {0, 1}


def test_locality_of_single_event_change():
    rng = np.random.Generator(np.random.Philox(key=9))
    stack = rng.integers(0, 2, (6, 10, 10))
    changed = stack.copy()
    changed[3, 5, 5] += 1
    params = STCoreParams(1, 1, 2, 1)
    a = np.stack(st_filter(list(stack), params))
    b = np.stack(st_filter(list(changed), params))
    diff = np.argwhere(a != b)
    for t, y, x in diff:
        assert 3 <= t < 3 + params.delta_t
        assert 5 - params.delta_s <= y <= 5
        assert 5 - params.delta_s <= x <= 5


def test_strong_keeps_fewer_pixels_than_weak():
    rng = np.random.Generator(np.random.Philox(key=10))
    stack = rng.integers(0, 2, (8, 16, 16))
    weak = np.stack(st_filter(list(stack), WEAK_PARAMS))
    strong = np.stack(st_filter(list(stack), STRONG_PARAMS))
    assert strong.sum() < weak.sum()


def test_kernel_backends_agree():
    rng = np.random.Generator(np.random.Philox(key=11))
    stack = rng.integers(0, 4, (5, 12, 9)).astype(np.int64)
    ref = _kernels._st_filter_stack_numpy(stack, 1, 2, 2, 2)
    got = _kernels.st_filter_stack(stack, 1, 2, 2, 2)
    assert np.array_equal(ref, got)
    grid = rng.integers(0, 4, (11, 13)).astype(np.int64)
    assert np.array_equal(
        _kernels._window_sum_numpy(grid, 2), _kernels.window_sum(grid, 2)
    )


def test_params_validation_and_warnings():
    with pytest.raises(ValueError):
        STCoreParams(-1, 1, 1, 1).validate()
    with pytest.raises(ValueError):
        STCoreParams(1, 0, 1, 1).validate()
    assert STCoreParams(1, 1, 2, 3).warnings()
    assert not STCoreParams(1, 1, 2, 2).warnings()


def test_st_filter_geometry_mismatch():
    with pytest.raises(GeometryError):
        st_filter([np.zeros((4, 4)), np.zeros((5, 4))], WEAK_PARAMS)


def test_st_filter_empty_input():
    assert st_filter([], WEAK_PARAMS) == []
