"""Temporal detectors: movement direction from frame-to-frame comparison.

An active pixel at frame t collects one input unit per active pixel at
frame t - delta_t whose location along the configured axis lies behind
it by more than theta_l (sign selects which way "behind" points). Pixels
whose input count reaches theta_te spike; the per-frame object location
is the maximum axis index among spiking pixels. Location deltas are
tokenized into movement runs (TD / BU / LR / RL) and matched against
reference patterns: single-token references ask for the dominant token,
four-token loop references match under cyclic rotation since a recording
can start at any phase.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

TOKEN_TOP_DOWN = "TD"
TOKEN_BOTTOM_UP = "BU"
TOKEN_LEFT_RIGHT = "LR"
TOKEN_RIGHT_LEFT = "RL"
TOKENS = (TOKEN_TOP_DOWN, TOKEN_BOTTOM_UP, TOKEN_LEFT_RIGHT, TOKEN_RIGHT_LEFT)

AXES = ("vertical", "horizontal")
SIGNS = ("increasing", "decreasing")


@dataclass(frozen=True)
class TemporalPattern:
    """Collapsed movement-token sequence, with per-run frame counts."""

    tokens: tuple[str, ...]
    run_lengths: tuple[int, ...] = ()

    def __post_init__(self):
        for tok in self.tokens:
            if tok not in TOKENS:
                raise ValueError(f"unknown movement token {tok!r}")
        for a, b in zip(self.tokens, self.tokens[1:]):
            if a == b:
                raise ValueError("pattern tokens must be collapsed (no repeats)")
        if self.run_lengths and len(self.run_lengths) != len(self.tokens):
            raise ValueError("run_lengths must match tokens")

    def dominant(self) -> Optional[str]:
        """Token of the longest run; earliest wins ties; None when empty."""
        if not self.tokens:
            return None
        if not self.run_lengths:
            return self.tokens[0]
        best = max(range(len(self.tokens)), key=lambda i: (self.run_lengths[i], -i))
        return self.tokens[best]


#: Loop references: a visually clockwise sweep reads top-down, right-left,
#: bottom-up, left-right; counter-clockwise swaps the horizontal legs.
CLOCKWISE_PATTERN = TemporalPattern(
    (TOKEN_TOP_DOWN, TOKEN_RIGHT_LEFT, TOKEN_BOTTOM_UP, TOKEN_LEFT_RIGHT)
)
COUNTER_CLOCKWISE_PATTERN = TemporalPattern(
    (TOKEN_TOP_DOWN, TOKEN_LEFT_RIGHT, TOKEN_BOTTOM_UP, TOKEN_RIGHT_LEFT)
)


@dataclass(frozen=True)
class LocationTrace:
    """Per-frame object location (max spiking index), None when silent."""

    values: tuple[Optional[int], ...]

    def __len__(self) -> int:
        return len(self.values)


@dataclass(frozen=True)
class TemporalSNNParams:
    """One directional comparison instance.

    `axis` picks which coordinate is the location; `sign` picks the
    passing direction ('increasing' fires when the current location
    exceeds the compared one by more than theta_l).
    """

    feature_id: str
    axis: str
    sign: str
    delta_t: int = 1
    theta_l: int = 0
    theta_te: int = 1
    reference_pattern: Optional[TemporalPattern] = None
    min_run: int = 3

    def validate(self) -> None:
        if self.axis not in AXES:
            raise ValueError(f"axis must be one of {AXES}")
        if self.sign not in SIGNS:
            raise ValueError(f"sign must be one of {SIGNS}")
        if self.delta_t < 1:
            raise ValueError("delta_t must be >= 1")
        if self.theta_l < 0:
            raise ValueError("theta_l must be >= 0")
        if self.theta_te < 1:
            raise ValueError("theta_te must be >= 1")
        if self.min_run < 1:
            raise ValueError("min_run must be >= 1")


def _line_histogram(grid: np.ndarray, axis: str) -> np.ndarray:
    """Counts of active pixels per location line (per row or per column)."""
    g = np.asarray(grid) != 0
    return g.sum(axis=1) if axis == "vertical" else g.sum(axis=0)


def temporal_neuron_inputs(
    frame_now: np.ndarray,
    frame_prev: np.ndarray,
    params: TemporalSNNParams,
) -> np.ndarray:
    """Input counts per active pixel of the current frame.

    counts[y, x] is the number of active pixels in the compared frame
    whose location difference passes the sign test; inactive pixels get 0.
    """
    params.validate()
    now = np.asarray(frame_now) != 0
    hist_prev = _line_histogram(frame_prev, params.axis)
    n_lines = hist_prev.shape[0]
    cum = np.concatenate([[0], np.cumsum(hist_prev)])
    total = cum[-1]

    per_line = np.zeros(n_lines, dtype=np.int64)
    for line in range(n_lines):
        if params.sign == "increasing":
            # previous locations strictly more than theta_l below `line`
            hi = line - params.theta_l
            per_line[line] = cum[hi] if hi > 0 else 0
        else:
            lo = line + params.theta_l
            per_line[line] = total - cum[min(lo + 1, n_lines)] if lo < n_lines else 0

    counts = np.zeros(now.shape, dtype=np.int64)
    if params.axis == "vertical":
        counts[now] = per_line[np.nonzero(now)[0]]
    else:
        counts[now] = per_line[np.nonzero(now)[1]]
    return counts


def temporal_spikes(counts: np.ndarray, theta_te: int) -> np.ndarray:
    """Binary grid of neurons whose input count reached theta_te."""
    return (np.asarray(counts) >= theta_te).astype(np.uint8)


def location_trace(
    st_outputs: Sequence[np.ndarray], params: TemporalSNNParams
) -> LocationTrace:
    """Per-frame max axis index of spiking neurons for one instance.

    The first delta_t frames have no comparison reference and are None.
    """
    params.validate()
    values: list[Optional[int]] = []
    for t in range(len(st_outputs)):
        if t < params.delta_t:
            values.append(None)
            continue
        counts = temporal_neuron_inputs(
            st_outputs[t], st_outputs[t - params.delta_t], params
        )
        fired = temporal_spikes(counts, params.theta_te)
        if params.axis == "vertical":
            lines = np.nonzero(fired.any(axis=1))[0]
        else:
            lines = np.nonzero(fired.any(axis=0))[0]
        values.append(int(lines.max()) if len(lines) else None)
    return LocationTrace(tuple(values))


def _frame_labels(
    trace_vertical: LocationTrace, trace_horizontal: LocationTrace
) -> list[Optional[str]]:
    v = trace_vertical.values
    h = trace_horizontal.values
    if len(v) != len(h):
        raise ValueError("traces must cover the same frame range")
    labels: list[Optional[str]] = []
    for t in range(1, len(v)):
        dv = v[t] - v[t - 1] if v[t] is not None and v[t - 1] is not None else None
        dh = h[t] - h[t - 1] if h[t] is not None and h[t - 1] is not None else None
        if dv is None and dh is None:
            labels.append(None)
            continue
        dv = 0 if dv is None else dv
        dh = 0 if dh is None else dh
        if dv == 0 and dh == 0:
            labels.append(None)
        elif abs(dv) >= abs(dh):  # ties go vertical
            labels.append(TOKEN_TOP_DOWN if dv > 0 else TOKEN_BOTTOM_UP)
        else:
            labels.append(TOKEN_LEFT_RIGHT if dh > 0 else TOKEN_RIGHT_LEFT)
    return labels


def tokenize(
    trace_vertical: LocationTrace,
    trace_horizontal: LocationTrace,
    min_run: int = 3,
) -> TemporalPattern:
    """Label frames by dominant location delta and collapse into runs.

    Unlabeled frames (silent or zero delta) are transparent: they do not
    break a run. Runs shorter than min_run are discarded, then adjacent
    equal tokens merge.
    """
    labels = [lab for lab in _frame_labels(trace_vertical, trace_horizontal) if lab]
    runs: list[tuple[str, int]] = []
    for lab in labels:
        if runs and runs[-1][0] == lab:
            runs[-1] = (lab, runs[-1][1] + 1)
        else:
            runs.append((lab, 1))
    kept = [(tok, n) for tok, n in runs if n >= min_run]
    merged: list[tuple[str, int]] = []
    for tok, n in kept:
        if merged and merged[-1][0] == tok:
            merged[-1] = (tok, merged[-1][1] + n)
        else:
            merged.append((tok, n))
    return TemporalPattern(
        tuple(tok for tok, _ in merged), tuple(n for _, n in merged)
    )


def match_pattern(observed: TemporalPattern, reference: TemporalPattern) -> int:
    """1 when the observed pattern realizes the reference.

    Single-token references require the token to dominate (longest run).
    Longer references match when some cyclic rotation of the observed
    sequence equals them; the wrap-around duplicate of a loop that starts
    and ends mid-token is merged first.
    """
    if not reference.tokens:
        raise ValueError("reference pattern must be non-empty")
    if len(reference.tokens) == 1:
        return 1 if observed.dominant() == reference.tokens[0] else 0
    toks = list(observed.tokens)
    if len(toks) > 1 and toks[0] == toks[-1]:
        toks.pop()
    if len(toks) != len(reference.tokens):
        return 0
    for r in range(len(toks)):
        if tuple(toks[r:] + toks[:r]) == reference.tokens:
            return 1
    return 0


@dataclass(frozen=True)
class TemporalFeatureConfig:
    """A bank slot: comparison parameters plus the reference to match."""

    feature_id: str
    reference: TemporalPattern
    delta_t: int = 1
    theta_l: int = 0
    theta_te: int = 1
    min_run: int = 3


def axis_location_traces(
    st_outputs: Sequence[np.ndarray],
    delta_t: int,
    theta_l: int,
    theta_te: int,
) -> tuple[LocationTrace, LocationTrace]:
    """Vertical and horizontal object-location traces, both signs combined.

    Equivalent to taking, per frame, the max over the increasing- and
    decreasing-sign instances of `location_trace`; vectorized over the
    whole stack for the bank evaluator.
    """
    n = len(st_outputs)
    if n == 0:
        return LocationTrace(()), LocationTrace(())
    stack = np.stack([np.asarray(g) != 0 for g in st_outputs])
    traces = []
    for axis_dim, n_lines in ((2, stack.shape[1]), (1, stack.shape[2])):
        hist = stack.sum(axis=axis_dim)  # (T, lines)
        cum = np.concatenate(
            [np.zeros((n, 1), dtype=np.int64), np.cumsum(hist, axis=1)], axis=1
        )
        total = cum[:, -1]
        values: list[Optional[int]] = [None] * n
        if n > delta_t:
            lines = np.arange(n_lines)
            hi = lines - theta_l
            lo = lines + theta_l
            prev_cum = cum[: n - delta_t]
            prev_total = total[: n - delta_t]
            inc = np.where(hi > 0, prev_cum[:, np.clip(hi, 0, n_lines)], 0)
            dec = np.where(
                lo < n_lines,
                prev_total[:, None] - prev_cum[:, np.clip(lo + 1, 0, n_lines)],
                0,
            )
            fired = (hist[delta_t:] > 0) & ((inc >= theta_te) | (dec >= theta_te))
            has = fired.any(axis=1)
            idx = n_lines - 1 - fired[:, ::-1].argmax(axis=1)
            for k in range(n - delta_t):
                if has[k]:
                    values[k + delta_t] = int(idx[k])
        traces.append(LocationTrace(tuple(values)))
    return traces[0], traces[1]


def evaluate_temporal_features(
    st_outputs: Sequence[np.ndarray],
    configs: Sequence[TemporalFeatureConfig],
) -> dict[str, int]:
    """Feature bits for a whole bank, sharing work between slots.

    Slots that agree on (delta_t, theta_l, theta_te, min_run) see the
    same token pattern, so it is computed once per parameter group.
    """
    patterns: dict[tuple[int, int, int, int], TemporalPattern] = {}
    bits: dict[str, int] = {}
    for cfg in configs:
        key = (cfg.delta_t, cfg.theta_l, cfg.theta_te, cfg.min_run)
        if key not in patterns:
            tv, th = axis_location_traces(
                st_outputs, cfg.delta_t, cfg.theta_l, cfg.theta_te
            )
            patterns[key] = tokenize(tv, th, cfg.min_run)
        bits[cfg.feature_id] = match_pattern(patterns[key], cfg.reference)
    return bits
