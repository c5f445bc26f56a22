import numpy as np
import pytest

from sgf.events import SyntheticGestureSpec, bin_frames, gen_synthetic
from sgf.snn_temporal import (
    CLOCKWISE_PATTERN,
    COUNTER_CLOCKWISE_PATTERN,
    LocationTrace,
    TemporalPattern,
    TemporalSNNParams,
    axis_location_traces,
    location_trace,
    match_pattern,
    temporal_neuron_inputs,
    temporal_spikes,
    tokenize,
)
from sgf.stcore import STCoreParams, st_filter


def pairwise_input_oracle(cur, prev, axis, sign, theta_l):
    """Exhaustive pairwise comparison over active pixels (the oracle)."""
    cur = np.asarray(cur)
    prev = np.asarray(prev)
    counts = np.zeros(cur.shape, dtype=int)
    cur_active = np.argwhere(cur != 0)
    prev_active = np.argwhere(prev != 0)
    ax = 0 if axis == "vertical" else 1
    for m in cur_active:
        for i in prev_active:
            diff = int(m[ax]) - int(i[ax])
            if sign == "decreasing":
                diff = -diff
            if diff > theta_l:
                counts[tuple(m)] += 1
    return counts


def _params(axis="vertical", sign="increasing", **kw):
    return TemporalSNNParams("T", axis, sign, **kw)


def test_first_frames_have_no_output():
    grid = np.ones((4, 4), dtype=np.uint8)
    trace = location_trace([grid] * 5, _params(delta_t=2))
    assert trace.values[0] is None and trace.values[1] is None
    assert trace.values[2] is not None


def test_empty_previous_frame_gives_zero_counts():
    cur = np.ones((4, 4), dtype=np.uint8)
    prev = np.zeros((4, 4), dtype=np.uint8)
    counts = temporal_neuron_inputs(cur, prev, _params())
    assert counts.sum() == 0


def test_toy_grid_count_matches_oracle():
    # 5x5 toy: prior active rows {1, 2}, current neuron at row 4, theta_l=0;
    # top-down (current row exceeds compared row) collects both inputs.
    prev = np.zeros((5, 5), dtype=np.uint8)
    prev[1, 2] = 1
    prev[2, 0] = 1
    cur = np.zeros((5, 5), dtype=np.uint8)
    cur[4, 3] = 1
    params = _params()
    counts = temporal_neuron_inputs(cur, prev, params)
    assert counts[4, 3] == 2
    assert np.array_equal(
        counts, pairwise_input_oracle(cur, prev, "vertical", "increasing", 0)
    )


def test_temporal_spikes_thresholds():
    counts = np.array([[3, 1], [0, 0]])
    fired = temporal_spikes(counts, 2)
    assert fired.tolist() == [[1, 0], [0, 0]]
    assert temporal_spikes(np.zeros((3, 3)), 1).sum() == 0


def test_random_configs_match_pairwise_oracle():
    rng = np.random.Generator(np.random.Philox(key=3))
    for _ in range(300):
        cur = np.zeros((4, 4), dtype=np.uint8)
        prev = np.zeros((4, 4), dtype=np.uint8)
        for grid in (cur, prev):
            k = int(rng.integers(0, 4))
            idx = rng.choice(16, size=k, replace=False)
            grid.flat[idx] = 1
        axis = ("vertical", "horizontal")[int(rng.integers(0, 2))]
        sign = ("increasing", "decreasing")[int(rng.integers(0, 2))]
        theta_l = int(rng.integers(0, 3))
        got = temporal_neuron_inputs(
            cur, prev, _params(axis=axis, sign=sign, theta_l=theta_l)
        )
        want = pairwise_input_oracle(cur, prev, axis, sign, theta_l)
        assert np.array_equal(got, want)


def test_location_trace_max_index():
    prev = np.zeros((6, 6), dtype=np.uint8)
    prev[0, 0] = 1
    cur = np.zeros((6, 6), dtype=np.uint8)
    cur[3, 1] = 1
    cur[5, 2] = 1
    trace = location_trace([prev, cur], _params(theta_te=1))
    assert trace.values == (None, 5)


def test_tokenize_single_direction():
    v = LocationTrace(tuple(range(10)))
    h = LocationTrace((3,) * 10)
    pattern = tokenize(v, h, min_run=3)
    assert pattern.tokens == ("TD",)
    assert pattern.run_lengths == (9,)


def test_tokenize_empty_traces():
    assert tokenize(LocationTrace(()), LocationTrace(()), 3).tokens == ()
    absent = LocationTrace((None,) * 6)
    assert tokenize(absent, absent, 3).tokens == ()


def test_tokenize_discards_short_runs_and_collapses():
    v = LocationTrace((0, 1, 2, 3, 3, 2, 4, 5, 6, 7))
    h = LocationTrace((0,) * 10)
    # deltas: TD TD TD 0 BU TD TD TD TD -> BU run of 1 dies, TD runs merge
    pattern = tokenize(v, h, min_run=3)
    assert pattern.tokens == ("TD",)
    assert pattern.run_lengths == (7,)


def test_tokenize_gaps_are_transparent():
    v = LocationTrace((0, 1, None, 2, 3, 4))
    h = LocationTrace((0, 0, None, 0, 0, 0))
    pattern = tokenize(v, h, min_run=3)
    assert pattern.tokens == ("TD",)


def test_tokenize_tie_goes_vertical():
    v = LocationTrace((0, 1, 2, 3))
    h = LocationTrace((0, 1, 2, 3))
    pattern = tokenize(v, h, min_run=1)
    assert pattern.tokens == ("TD",)


def test_match_single_token_dominance():
    assert match_pattern(TemporalPattern(("TD",), (9,)), TemporalPattern(("TD",))) == 1
    mixed = TemporalPattern(("TD", "LR"), (4, 9))
    assert match_pattern(mixed, TemporalPattern(("LR",))) == 1
    assert match_pattern(mixed, TemporalPattern(("TD",))) == 0
    assert match_pattern(TemporalPattern(()), TemporalPattern(("TD",))) == 0


def test_match_cyclic_rotations():
    cw = ("TD", "RL", "BU", "LR")
    for r in range(4):
        rotated = TemporalPattern(cw[r:] + cw[:r])
        assert match_pattern(rotated, CLOCKWISE_PATTERN) == 1
    # wrap-around duplicate merges before rotation matching
    wrapped = TemporalPattern(("TD", "RL", "BU", "LR", "TD"))
    assert match_pattern(wrapped, CLOCKWISE_PATTERN) == 1


def test_match_ccw_is_not_cw():
    # rotation-enumeration oracle: no rotation of the ccw loop equals cw
    ccw = ("TD", "LR", "BU", "RL")
    for r in range(4):
        rotated = tuple(ccw[r:] + ccw[:r])
        assert rotated != CLOCKWISE_PATTERN.tokens
    assert match_pattern(TemporalPattern(ccw), CLOCKWISE_PATTERN) == 0
    assert match_pattern(TemporalPattern(ccw), COUNTER_CLOCKWISE_PATTERN) == 1


def test_pattern_validation():
    with pytest.raises(ValueError):
        TemporalPattern(("TD", "TD"))
    with pytest.raises(ValueError):
        TemporalPattern(("XX",))


def _moving_dot_stack(path, shape=(8, 8)):
    frames = []
    for y, x in path:
        g = np.zeros(shape, dtype=np.uint8)
        g[y, x] = 1
        frames.append(g)
    return frames


def test_direction_antisymmetry_on_reversal():
    path = [(y, 2) for y in range(8)]
    frames = _moving_dot_stack(path)
    fwd_v, fwd_h = axis_location_traces(frames, 1, 0, 1)
    rev_v, rev_h = axis_location_traces(frames[::-1], 1, 0, 1)
    fwd = tokenize(fwd_v, fwd_h, 3)
    rev = tokenize(rev_v, rev_h, 3)
    assert fwd.tokens == ("TD",)
    assert rev.tokens == ("BU",)


def test_axis_traces_match_per_sign_composition():
    rng = np.random.Generator(np.random.Philox(key=6))
    for delta_t, theta_l, theta_te in [(1, 0, 1), (2, 1, 2), (1, 1, 1)]:
        frames = [rng.integers(0, 2, (7, 7)).astype(np.uint8) for _ in range(6)]
        tv, th = axis_location_traces(frames, delta_t, theta_l, theta_te)
        for axis, got in (("vertical", tv), ("horizontal", th)):
            inc = location_trace(
                frames,
                _params(axis=axis, sign="increasing", delta_t=delta_t,
                        theta_l=theta_l, theta_te=theta_te),
            )
            dec = location_trace(
                frames,
                _params(axis=axis, sign="decreasing", delta_t=delta_t,
                        theta_l=theta_l, theta_te=theta_te),
            )
            merged = tuple(
                None if a is None and b is None
                else max(v for v in (a, b) if v is not None)
                for a, b in zip(inc.values, dec.values)
            )
            assert got.values == merged


def _gesture_pattern(kind, seed, **kw):
    spec = SyntheticGestureSpec(kind, noise_density=0.0, **kw)
    frames = bin_frames(gen_synthetic(spec, seed))
    st = st_filter(frames, STCoreParams(1, 2, 2, 2))
    tv, th = axis_location_traces(st, 1, 0, 2)
    return tokenize(tv, th, 3)


def test_linear_gestures_dominant_tokens():
    assert _gesture_pattern("linear-down", 31).dominant() == "TD"
    assert _gesture_pattern("linear-up", 32).dominant() == "BU"
    assert _gesture_pattern("linear-right", 33).dominant() == "LR"
    assert _gesture_pattern("linear-left", 34).dominant() == "RL"


def test_loop_gestures_mutually_exclusive():
    for seed in (41, 42):
        cw = _gesture_pattern("circular-cw", seed, amplitude=22)
        ccw = _gesture_pattern("circular-ccw", seed, amplitude=22)
        assert match_pattern(cw, CLOCKWISE_PATTERN) == 1
        assert match_pattern(cw, COUNTER_CLOCKWISE_PATTERN) == 0
        assert match_pattern(ccw, COUNTER_CLOCKWISE_PATTERN) == 1
        assert match_pattern(ccw, CLOCKWISE_PATTERN) == 0


def test_params_validation():
    with pytest.raises(ValueError):
        _params(axis="diagonal").validate()
    with pytest.raises(ValueError):
        _params(delta_t=0).validate()
    with pytest.raises(ValueError):
        _params(theta_te=0).validate()
