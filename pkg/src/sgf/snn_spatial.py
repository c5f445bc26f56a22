"""Spatial detectors: accumulate filtered frames, gate by intensity then area.

Each sub-network watches one rectangular region and reports a single
feature bit: the intensity gate fires pixels whose accumulated count
reaches theta_i, the area gate fires when enough region pixels passed.
Three archetypes cover the parameter regimes: constrained-intensive
(theta_i > theta_a), plateau-mild (theta_i < theta_a), and
location-specific point detectors.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import GeometryError

ARCHETYPES = ("constrained-intensive", "plateau-mild", "location-specific")


@dataclass(frozen=True)
class Region:
    """Axis-aligned rectangle: origin (x, y), width, height (pixels)."""

    x: int
    y: int
    width: int
    height: int

    def validate(self, geometry: tuple[int, int]) -> None:
        w, h = geometry
        if self.width < 1 or self.height < 1:
            raise GeometryError(f"empty region {self}")
        if not (0 <= self.x and self.x + self.width <= w):
            raise GeometryError(f"region {self} exceeds geometry {w}x{h}")
        if not (0 <= self.y and self.y + self.height <= h):
            raise GeometryError(f"region {self} exceeds geometry {w}x{h}")

    def slices(self) -> tuple[slice, slice]:
        return (
            slice(self.y, self.y + self.height),
            slice(self.x, self.x + self.width),
        )


@dataclass(frozen=True)
class SpatialSNNParams:
    """One spatial sub-network: detection region plus the two gate thresholds."""

    feature_id: str
    region: Region
    theta_i: int
    theta_a: int
    archetype: str = "constrained-intensive"

    def validate(self, geometry: tuple[int, int]) -> None:
        self.region.validate(geometry)
        if self.theta_i < 1 or self.theta_a < 1:
            raise ValueError(f"{self.feature_id}: gate thresholds must be >= 1")
        if self.archetype not in ARCHETYPES:
            raise ValueError(f"{self.feature_id}: unknown archetype {self.archetype!r}")
        if self.archetype == "constrained-intensive" and not self.theta_i > self.theta_a:
            raise ValueError(
                f"{self.feature_id}: constrained-intensive requires theta_i > theta_a"
            )
        if self.archetype == "plateau-mild" and not self.theta_i < self.theta_a:
            raise ValueError(
                f"{self.feature_id}: plateau-mild requires theta_i < theta_a"
            )


def accumulate(st_outputs: Sequence[np.ndarray]) -> np.ndarray:
    """Per-pixel sum of binary activations over all frames."""
    if len(st_outputs) == 0:
        raise ValueError("cannot accumulate zero frames")
    stack = np.stack([np.asarray(g) for g in st_outputs])
    return stack.sum(axis=0, dtype=np.int32)


def spatial_response(count_grid: np.ndarray, params: SpatialSNNParams) -> int:
    """Feature bit: 1 when >= theta_a region pixels accumulated >= theta_i."""
    h, w = count_grid.shape
    params.validate((w, h))
    window = count_grid[params.region.slices()]
    fired = int((window >= params.theta_i).sum())
    return 1 if fired >= params.theta_a else 0
