"""Event-stream ingestion, spike-count frame binning, synthetic gestures.

Event files are plain UTF-8 text, one event per line as ``t,x,y,p`` with
LF terminators and no header; geometry travels out-of-band. Polarity is
-1/+1 on the wire (0/1 inputs are accepted and mapped to -1/+1).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .errors import GeometryError, StreamFormatError

#: Microseconds covered by one generated frame slot.
FRAME_DT_US = 10_000

#: Default number of spikes binned into one frame.
SPIKES_PER_FRAME = 1000

TRAJECTORY_KINDS = (
    "linear-down",
    "linear-up",
    "linear-left",
    "linear-right",
    "circular-cw",
    "circular-ccw",
    "oscillate-small-area",
    "oscillate-large-area",
)


@dataclass(frozen=True)
class SpikeEvent:
    """One sensor event: timestamp (us), column, row, polarity (-1/+1)."""

    t: int
    x: int
    y: int
    polarity: int


class EventStream:
    """An ordered event record with its grid geometry and optional label.

    Events are held as parallel numpy arrays (``t``, ``x``, ``y``, ``p``)
    sorted by non-decreasing timestamp. Instances are treated as
    immutable once built.
    """

    __slots__ = ("geometry", "t", "x", "y", "p", "label")

    def __init__(self, geometry, t, x, y, p, label=None, _validate=True):
        self.geometry = (int(geometry[0]), int(geometry[1]))
        self.t = np.asarray(t, dtype=np.int64)
        self.x = np.asarray(x, dtype=np.int32)
        self.y = np.asarray(y, dtype=np.int32)
        self.p = np.asarray(p, dtype=np.int8)
        self.label = label
        if _validate:
            self._check()

    def _check(self) -> None:
        w, h = self.geometry
        if w <= 0 or h <= 0:
            raise GeometryError(f"degenerate geometry {self.geometry}")
        n = len(self.t)
        if not (len(self.x) == len(self.y) == len(self.p) == n):
            raise StreamFormatError("event arrays have mismatched lengths")
        if n == 0:
            return
        if self.t[0] < 0:
            raise StreamFormatError("negative timestamp")
        if np.any(np.diff(self.t) < 0):
            bad = int(np.argmax(np.diff(self.t) < 0)) + 2
            raise StreamFormatError("decreasing timestamp", line=bad)
        if self.x.min() < 0 or self.x.max() >= w:
            raise StreamFormatError(f"column index outside geometry {w}x{h}")
        if self.y.min() < 0 or self.y.max() >= h:
            raise StreamFormatError(f"row index outside geometry {w}x{h}")
        if not np.all(np.abs(self.p) == 1):
            raise StreamFormatError("polarity must be -1 or +1")

    def __len__(self) -> int:
        return len(self.t)

    def __iter__(self) -> Iterator[SpikeEvent]:
        for i in range(len(self.t)):
            yield SpikeEvent(
                int(self.t[i]), int(self.x[i]), int(self.y[i]), int(self.p[i])
            )

    def __getitem__(self, i: int) -> SpikeEvent:
        return SpikeEvent(
            int(self.t[i]), int(self.x[i]), int(self.y[i]), int(self.p[i])
        )

    @classmethod
    def from_events(cls, geometry, events: Sequence[SpikeEvent], label=None):
        t = [e.t for e in events]
        x = [e.x for e in events]
        y = [e.y for e in events]
        p = [e.polarity for e in events]
        return cls(geometry, t, x, y, p, label=label)

    def with_label(self, label) -> "EventStream":
        return EventStream(
            self.geometry, self.t, self.x, self.y, self.p, label=label,
            _validate=False,
        )


@dataclass(frozen=True)
class Frame:
    """One spike-count frame: ordinal index plus an (H, W) count grid.

    Each binned event adds one unit of mass at its pixel regardless of
    polarity, so ``abs(grid).sum()`` equals the number of events binned
    (signed polarity binning is available behind ``bin_frames(signed=)``
    for experiments and does not carry that guarantee).
    """

    index: int
    grid: np.ndarray

    def mass(self) -> int:
        return int(np.abs(self.grid).sum())


@dataclass(frozen=True)
class SyntheticGestureSpec:
    """Parameters for one synthetic labeled gesture clip.

    `center` and `amplitude` default per trajectory kind; `cycles` sets
    how many oscillation/rotation periods fit in the clip.
    """

    kind: str
    blob_radius: int = 6
    events_per_frame: int = 900
    noise_density: float = 0.0
    frame_count: int = 64
    geometry: tuple[int, int] = (128, 128)
    center: Optional[tuple[float, float]] = None
    amplitude: Optional[float] = None
    cycles: float = 1.0

    def validate(self) -> None:
        w, h = self.geometry
        if w <= 0 or h <= 0:
            raise GeometryError(f"degenerate geometry {self.geometry}")
        if self.kind not in TRAJECTORY_KINDS:
            raise ValueError(f"unknown trajectory kind {self.kind!r}")
        if self.blob_radius < 1:
            raise ValueError("blob_radius must be >= 1")
        if self.events_per_frame < 1:
            raise ValueError("events_per_frame must be >= 1")
        if not (0.0 <= self.noise_density < 1.0):
            raise ValueError("noise_density must be in [0, 1)")
        if self.frame_count < 1:
            raise ValueError("frame_count must be >= 1")


def parse_event_stream(text: str, geometry, label=None) -> EventStream:
    """Parse ``t,x,y,p`` lines into a validated stream.

    Accepts polarity -1/+1 or 0/1 (0 maps to -1). Raises
    StreamFormatError naming the 1-based line of the first malformed
    record, out-of-geometry coordinate, or decreasing timestamp.
    """
    w, h = int(geometry[0]), int(geometry[1])
    if w <= 0 or h <= 0:
        raise GeometryError(f"degenerate geometry {geometry}")
    ts, xs, ys, ps = [], [], [], []
    prev_t = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 4:
            raise StreamFormatError(
                f"expected 4 comma-separated fields, got {len(parts)}",
                line=lineno,
            )
        try:
            t, x, y, p = (int(part) for part in parts)
        except ValueError:
            raise StreamFormatError(
                f"non-integer field in record {line!r}", line=lineno
            ) from None
        if t < 0:
            raise StreamFormatError("negative timestamp", line=lineno)
        if t < prev_t:
            raise StreamFormatError("decreasing timestamp", line=lineno)
        prev_t = t
        if not (0 <= x < w):
            raise StreamFormatError(
                f"column {x} outside geometry {w}x{h}", line=lineno
            )
        if not (0 <= y < h):
            raise StreamFormatError(
                f"row {y} outside geometry {w}x{h}", line=lineno
            )
        if p == 0:
            p = -1
        if p not in (-1, 1):
            raise StreamFormatError(f"polarity {p} not in {{-1,0,1}}", line=lineno)
        ts.append(t)
        xs.append(x)
        ys.append(y)
        ps.append(p)
    return EventStream((w, h), ts, xs, ys, ps, label=label, _validate=False)


def serialize_event_stream(stream: EventStream) -> str:
    """Render a stream in the canonical file form (-1/+1 polarity)."""
    lines = [
        f"{int(t)},{int(x)},{int(y)},{int(p)}"
        for t, x, y, p in zip(stream.t, stream.x, stream.y, stream.p)
    ]
    return "\n".join(lines) + ("\n" if lines else "")


def bin_frames(
    stream: EventStream,
    spikes_per_frame: int = SPIKES_PER_FRAME,
    signed: bool = False,
) -> list[Frame]:
    """Bin consecutive runs of exactly `spikes_per_frame` events into frames.

    A trailing partial run is dropped, so every frame carries the same
    spike mass. With ``signed=True`` the grid accumulates the polarity
    sum instead of the event count.
    """
    if spikes_per_frame < 1:
        raise ValueError("spikes_per_frame must be >= 1")
    w, h = stream.geometry
    n_frames = len(stream) // spikes_per_frame
    frames = []
    for k in range(n_frames):
        sl = slice(k * spikes_per_frame, (k + 1) * spikes_per_frame)
        lin = stream.y[sl].astype(np.int64) * w + stream.x[sl]
        weights = stream.p[sl].astype(np.int64) if signed else None
        grid = np.bincount(lin, weights=weights, minlength=w * h)
        frames.append(Frame(index=k, grid=grid.reshape(h, w).astype(np.int32)))
    return frames


def _centroid_path(spec: SyntheticGestureSpec) -> np.ndarray:
    """Per-frame float centroid (x, y) for the spec trajectory."""
    w, h = spec.geometry
    n = spec.frame_count
    pad = spec.blob_radius + 2
    cx = w / 2.0 if spec.center is None else float(spec.center[0])
    cy = h / 2.0 if spec.center is None else float(spec.center[1])
    f = np.arange(n, dtype=np.float64)
    u = f / max(n - 1, 1)

    if spec.kind == "linear-down":
        xs = np.full(n, cx)
        ys = pad + (h - 1 - 2 * pad) * u
    elif spec.kind == "linear-up":
        xs = np.full(n, cx)
        ys = (h - 1 - pad) - (h - 1 - 2 * pad) * u
    elif spec.kind == "linear-right":
        xs = pad + (w - 1 - 2 * pad) * u
        ys = np.full(n, cy)
    elif spec.kind == "linear-left":
        xs = (w - 1 - pad) - (w - 1 - 2 * pad) * u
        ys = np.full(n, cy)
    elif spec.kind in ("circular-cw", "circular-ccw"):
        radius = spec.amplitude
        if radius is None:
            radius = min(w, h) / 2.0 - pad - spec.blob_radius
        # Screen convention (y grows downward): increasing phase is the
        # visually clockwise sweep.
        sign = 1.0 if spec.kind == "circular-cw" else -1.0
        phase = sign * 2.0 * math.pi * spec.cycles * f / n
        xs = cx + radius * np.cos(phase)
        ys = cy + radius * np.sin(phase)
    elif spec.kind == "oscillate-small-area":
        # Slow sub-pixel wobble: concentrated dwell, no direction tokens.
        a = 1.0 if spec.amplitude is None else float(spec.amplitude)
        phase = 2.0 * math.pi * spec.cycles * f / n
        xs = cx + a * np.cos(phase)
        ys = cy + a * np.sin(phase)
    elif spec.kind == "oscillate-large-area":
        a = spec.amplitude
        if a is None:
            a = w / 2.0 - pad - spec.blob_radius
        phase = 2.0 * math.pi * spec.cycles * f / n
        xs = cx + a * np.sin(phase)
        ys = np.full(n, cy)
    else:  # pragma: no cover - guarded by validate()
        raise ValueError(spec.kind)

    xs = np.clip(xs, pad, w - 1 - pad)
    ys = np.clip(ys, pad, h - 1 - pad)
    return np.stack([xs, ys], axis=1)


def _disk_offsets(radius: int) -> np.ndarray:
    """Integer (dx, dy) offsets with dx^2 + dy^2 <= radius^2."""
    r = int(radius)
    span = np.arange(-r, r + 1)
    dx, dy = np.meshgrid(span, span)
    keep = dx * dx + dy * dy <= r * r
    return np.stack([dx[keep], dy[keep]], axis=1)


def gen_synthetic(
    spec: SyntheticGestureSpec,
    seed: int,
    return_noise_mask: bool = False,
):
    """Generate a deterministic synthetic gesture event stream.

    Uses a counter-based PRNG (Philox) keyed on `seed` only, so identical
    (spec, seed) pairs give byte-identical streams. With
    ``return_noise_mask=True`` also returns a per-event boolean array
    marking background-noise events, for filter-quality oracles.
    """
    spec.validate()
    w, h = spec.geometry
    rng = np.random.Generator(np.random.Philox(key=seed & 0xFFFFFFFFFFFFFFFF))
    path = _centroid_path(spec)
    offsets = _disk_offsets(spec.blob_radius)

    all_x, all_y, all_t, all_noise = [], [], [], []
    for f in range(spec.frame_count):
        cx, cy = path[f]
        pick = rng.integers(0, len(offsets), size=spec.events_per_frame)
        bx = np.clip(np.rint(cx).astype(np.int64) + offsets[pick, 0], 0, w - 1)
        by = np.clip(np.rint(cy).astype(np.int64) + offsets[pick, 1], 0, h - 1)

        n_noise = int(rng.binomial(w * h, spec.noise_density))
        nx = rng.integers(0, w, size=n_noise)
        ny = rng.integers(0, h, size=n_noise)

        fx = np.concatenate([bx, nx])
        fy = np.concatenate([by, ny])
        noise = np.zeros(len(fx), dtype=bool)
        noise[len(bx):] = True

        order = rng.permutation(len(fx))
        fx, fy, noise = fx[order], fy[order], noise[order]
        offs = np.sort(rng.integers(0, FRAME_DT_US, size=len(fx)))
        ft = f * FRAME_DT_US + offs

        all_x.append(fx)
        all_y.append(fy)
        all_t.append(ft)
        all_noise.append(noise)

    x = np.concatenate(all_x)
    y = np.concatenate(all_y)
    t = np.concatenate(all_t)
    noise_mask = np.concatenate(all_noise)
    p = np.ones(len(x), dtype=np.int8)
    p[noise_mask] = rng.choice(np.array([-1, 1], dtype=np.int8), size=int(noise_mask.sum()))

    stream = EventStream((w, h), t, x, y, p, _validate=False)
    if return_noise_mask:
        return stream, noise_mask
    return stream


def blob_pixel_mask(
    spec: SyntheticGestureSpec, frame_index: int
) -> np.ndarray:
    """(H, W) bool mask of pixels reachable by blob events at one frame."""
    w, h = spec.geometry
    cx, cy = _centroid_path(spec)[frame_index]
    offsets = _disk_offsets(spec.blob_radius)
    bx = np.clip(np.rint(cx).astype(np.int64) + offsets[:, 0], 0, w - 1)
    by = np.clip(np.rint(cy).astype(np.int64) + offsets[:, 1], 0, h - 1)
    mask = np.zeros((h, w), dtype=bool)
    mask[by, bx] = True
    return mask
