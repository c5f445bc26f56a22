"""Hot numeric kernels, each in a numba and a pure-numpy build.

Every public function dispatches on the backend chosen in ``_backend``;
the ``*_numpy`` / ``*_numba`` variants are kept importable so the two
builds can be benchmarked and cross-checked against each other.

Grid convention throughout the package: arrays are indexed ``[row, col]``
(= ``[y, x]``), stacks are ``[frame, row, col]``.
"""

import numpy as np

from ._backend import HAS_NUMBA

if HAS_NUMBA:
    from numba import njit


def _window_sum_numpy(grid: np.ndarray, delta: int) -> np.ndarray:
    """Anchored window sum: out[y,x] = sum(grid[y:y+delta+1, x:x+delta+1]).

    Windows are clipped at the bottom/right borders. Uses an integral
    image, O(H*W) regardless of delta.
    """
    h, w = grid.shape
    ii = np.zeros((h + 1, w + 1), dtype=np.int64)
    np.cumsum(np.cumsum(grid, axis=0, dtype=np.int64), axis=1, out=ii[1:, 1:])
    y1 = np.minimum(np.arange(h) + delta + 1, h)
    x1 = np.minimum(np.arange(w) + delta + 1, w)
    y0 = np.arange(h)
    x0 = np.arange(w)
    return (
        ii[np.ix_(y1, x1)]
        - ii[np.ix_(y0, x1)]
        - ii[np.ix_(y1, x0)]
        + ii[np.ix_(y0, x0)]
    )


def _st_filter_stack_numpy(
    stack: np.ndarray, delta_s: int, theta_s: int, delta_t: int, theta_t: int
) -> np.ndarray:
    t_frames, h, w = stack.shape
    spatial = np.zeros((t_frames, h, w), dtype=np.int32)
    for t in range(t_frames):
        spatial[t] = _window_sum_numpy(stack[t], delta_s) >= theta_s
    out = np.zeros((t_frames, h, w), dtype=np.uint8)
    if t_frames >= delta_t:
        cs = np.zeros((t_frames + 1, h, w), dtype=np.int32)
        np.cumsum(spatial, axis=0, out=cs[1:])
        for t in range(delta_t - 1, t_frames):
            out[t] = (cs[t + 1] - cs[t + 1 - delta_t]) >= theta_t
    return out


if HAS_NUMBA:

    @njit(cache=True)
    def _window_sum_numba(grid, delta):
        h, w = grid.shape
        ii = np.zeros((h + 1, w + 1), dtype=np.int64)
        for y in range(h):
            row_acc = 0
            for x in range(w):
                row_acc += grid[y, x]
                ii[y + 1, x + 1] = ii[y, x + 1] + row_acc
        out = np.empty((h, w), dtype=np.int64)
        for y in range(h):
            y1 = min(y + delta + 1, h)
            for x in range(w):
                x1 = min(x + delta + 1, w)
                out[y, x] = ii[y1, x1] - ii[y, x1] - ii[y1, x] + ii[y, x]
        return out

    @njit(cache=True)
    def _st_filter_stack_numba(stack, delta_s, theta_s, delta_t, theta_t):
        t_frames, h, w = stack.shape
        spatial = np.zeros((t_frames, h, w), dtype=np.int32)
        for t in range(t_frames):
            win = _window_sum_numba(stack[t], delta_s)
            for y in range(h):
                for x in range(w):
                    if win[y, x] >= theta_s:
                        spatial[t, y, x] = 1
        out = np.zeros((t_frames, h, w), dtype=np.uint8)
        for t in range(delta_t - 1, t_frames):
            for y in range(h):
                for x in range(w):
                    acc = 0
                    for k in range(t - delta_t + 1, t + 1):
                        acc += spatial[k, y, x]
                    if acc >= theta_t:
                        out[t, y, x] = 1
        return out


def window_sum(grid: np.ndarray, delta: int) -> np.ndarray:
    """Clipped anchored window sum over a single grid."""
    grid = np.ascontiguousarray(grid, dtype=np.int64)
    if HAS_NUMBA:
        return _window_sum_numba(grid, delta)
    return _window_sum_numpy(grid, delta)


def st_filter_stack(
    stack: np.ndarray, delta_s: int, theta_s: int, delta_t: int, theta_t: int
) -> np.ndarray:
    """Two-stage spatiotemporal threshold filter over a frame stack.

    Stage 1 fires a pixel when the clipped anchored (delta_s+1)-square
    window sum meets theta_s; stage 2 fires when the stage-1 sum over the
    trailing delta_t-frame window meets theta_t. The first delta_t - 1
    frames are warm-up and come back all-zero.
    """
    stack = np.ascontiguousarray(stack, dtype=np.int64)
    if HAS_NUMBA:
        return _st_filter_stack_numba(stack, delta_s, theta_s, delta_t, theta_t)
    return _st_filter_stack_numpy(stack, delta_s, theta_s, delta_t, theta_t)
