"""Two-stage spatiotemporal preprocessing: noise cancellation + enhancement.

Stage one thresholds the spike mass inside a square window anchored at
each pixel; stage two thresholds how many of the trailing ``delta_t``
stage-one grids fired that pixel. Window sums use event magnitudes, so
opposite polarities cannot cancel legitimate activity (an experimental
signed reading is available via ``bin_frames(signed=True)`` upstream).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import _kernels
from .errors import GeometryError
from .events import Frame


@dataclass(frozen=True)
class STCoreParams:
    """Filter thresholds: spatial window/threshold, temporal window/threshold."""

    delta_s: int
    theta_s: int
    delta_t: int
    theta_t: int

    def validate(self) -> None:
        if self.delta_s < 0:
            raise ValueError("delta_s must be >= 0")
        if self.theta_s < 1:
            raise ValueError("theta_s must be >= 1")
        if self.delta_t < 1:
            raise ValueError("delta_t must be >= 1")
        if self.theta_t < 1:
            raise ValueError("theta_t must be >= 1")

    def warnings(self) -> list[str]:
        """Permitted-but-suspicious settings, e.g. an unsatisfiable theta_t."""
        notes = []
        if self.theta_t > self.delta_t:
            notes.append(
                f"theta_t={self.theta_t} exceeds delta_t={self.delta_t}: "
                "the temporal stage can never fire"
            )
        return notes


#: Weak noise-cancellation setting.
WEAK_PARAMS = STCoreParams(1, 1, 2, 2)
#: Strong noise-cancellation setting.
STRONG_PARAMS = STCoreParams(1, 1, 6, 5)

GridLike = Union[Frame, np.ndarray]


def _as_grid(frame: GridLike) -> np.ndarray:
    grid = frame.grid if isinstance(frame, Frame) else np.asarray(frame)
    if grid.ndim != 2 or grid.shape[0] < 1 or grid.shape[1] < 1:
        raise GeometryError(f"expected a 2-D grid, got shape {grid.shape}")
    return grid


def st_spatial_stage(frame: GridLike, delta_s: int, theta_s: int) -> np.ndarray:
    """Binary grid: pixel fires when the clipped anchored window of side
    (delta_s + 1) holds spike mass >= theta_s."""
    grid = np.abs(_as_grid(frame))
    return (_kernels.window_sum(grid, delta_s) >= theta_s).astype(np.uint8)


def st_temporal_stage(
    window: Sequence[np.ndarray], theta_t: int
) -> np.ndarray:
    """Binary grid at t from the spatial-stage grids for frames (t-delta_t, t].

    `window` must hold exactly the delta_t most recent spatial grids; a
    pixel fires when its window sum meets theta_t.
    """
    if len(window) == 0:
        raise ValueError("temporal window must hold at least one grid")
    stack = np.stack([np.asarray(g) for g in window])
    return (stack.sum(axis=0) >= theta_t).astype(np.uint8)


def st_filter(
    frames: Sequence[GridLike], params: STCoreParams
) -> list[np.ndarray]:
    """Apply both stages to a frame sequence.

    Output list length equals the input length; the first delta_t - 1
    frames are warm-up and come back all-zero.
    """
    params.validate()
    if len(frames) == 0:
        return []
    grids = [np.abs(_as_grid(f)) for f in frames]
    shape = grids[0].shape
    for g in grids[1:]:
        if g.shape != shape:
            raise GeometryError(
                f"frame grids disagree on geometry: {g.shape} vs {shape}"
            )
    stack = np.stack(grids)
    out = _kernels.st_filter_stack(
        stack, params.delta_s, params.theta_s, params.delta_t, params.theta_t
    )
    return [out[t] for t in range(out.shape[0])]
