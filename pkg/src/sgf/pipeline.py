"""End-to-end inference harness mirroring the hardware dataflow.

Events are packed into address-event packets, pushed through a bounded
FIFO, translated through the scheduler's lookup table, re-binned into
frames, filtered, and decoded against the stored-vector table. The
plumbing is semantically transparent: the predicted class always equals
the direct library path on the same stream. Step counts are scheduler
ticks, not wall-clock time.

Only the events that fill complete frames travel the bus; a trailing
partial frame would never be evaluated, so its packets are not sent and
the packets-transferred stat equals the number of binned events.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .aer import AddressLut, AerFifo, AerPacket, decode, encode, fifo_transfer
from .config import RunConfig
from .errors import GeometryError, StreamFormatError
from .events import EventStream, Frame
from .network import RouteResult, SGFModel

#: Default depth of the sending FIFO, in packets.
DEFAULT_FIFO_CAPACITY = 64


@dataclass(frozen=True)
class PipelineConfig:
    """Wiring of the inference harness around a trained model."""

    geometry: tuple[int, int] = (128, 128)
    spikes_per_frame: int = 1000
    fifo_capacity: int = DEFAULT_FIFO_CAPACITY

    @classmethod
    def from_run_config(cls, cfg: RunConfig) -> "PipelineConfig":
        return cls(
            geometry=cfg.geometry,
            spikes_per_frame=cfg.spikes_per_frame,
            fifo_capacity=cfg.fifo_capacity,
        )


@dataclass
class PipelineStats:
    events_in: int = 0
    packets_transferred: int = 0
    fifo_high_watermark: int = 0
    frames_processed: int = 0
    scheduler_steps: int = 0


@dataclass
class InferenceResult:
    predicted: int
    scores: dict[object, float]
    routing_path: list[str]
    stats: PipelineStats
    similarity: str
    route: Optional[RouteResult] = None


def _check_compat(stream: EventStream, config: PipelineConfig, model: SGFModel):
    if stream.geometry != config.geometry:
        raise GeometryError(
            f"stream geometry {stream.geometry} does not match pipeline "
            f"geometry {config.geometry}"
        )
    if model.geometry != config.geometry:
        raise GeometryError(
            f"model geometry {model.geometry} does not match pipeline "
            f"geometry {config.geometry}"
        )


def run_inference(
    stream: EventStream, config: PipelineConfig, model: SGFModel
) -> InferenceResult:
    """Classify one stream through the AER/FIFO/LUT dataflow."""
    _check_compat(stream, config, model)
    w, h = config.geometry
    n_binned = (len(stream) // config.spikes_per_frame) * config.spikes_per_frame
    if n_binned == 0:
        raise StreamFormatError(
            f"stream holds {len(stream)} events; at least "
            f"{config.spikes_per_frame} are needed for one frame"
        )

    packets = [
        AerPacket(
            col=int(stream.x[i]),
            row=int(stream.y[i]),
            polarity=1 if stream.p[i] > 0 else 0,
        )
        for i in range(n_binned)
    ]
    words = [encode(p) for p in packets]

    fifo = AerFifo(config.fifo_capacity)
    log = fifo_transfer([decode(word) for word in words], fifo)

    lut = AddressLut.identity(w, h)
    grids: list[np.ndarray] = []
    current = np.zeros(h * w, dtype=np.int32)
    filled = 0
    for record in log.records:
        current[lut.translate(record.packet)] += 1
        filled += 1
        if filled == config.spikes_per_frame:
            grids.append(current.reshape(h, w).copy())
            current[:] = 0
            filled = 0
    frames = [Frame(index=k, grid=g) for k, g in enumerate(grids)]

    route = model.route_frames(frames)
    final = route.steps[-1]
    stats = PipelineStats(
        events_in=len(stream),
        packets_transferred=len(log.records),
        fifo_high_watermark=log.high_watermark,
        frames_processed=len(frames),
        scheduler_steps=log.steps,
    )
    return InferenceResult(
        predicted=route.predicted,
        scores=dict(final.scores),
        routing_path=[f"{s.unit_id}:{s.selected}" for s in route.steps],
        stats=stats,
        similarity=model.similarity,
        route=route,
    )


@dataclass
class BatchSummary:
    total: int
    correct: int
    accuracy: float
    #: confusion[(true, predicted)] = count
    confusion: dict[tuple[int, int], int]
    per_class_counts: dict[int, int]

    def confusion_rows(self) -> list[tuple[int, int, int]]:
        return sorted((t, p, n) for (t, p), n in self.confusion.items())


def run_batch(
    samples: Sequence[tuple[EventStream, int]],
    config: PipelineConfig,
    model: SGFModel,
) -> BatchSummary:
    """Classify a labeled batch; deterministic aggregate in sample order."""
    confusion: dict[tuple[int, int], int] = {}
    per_class: dict[int, int] = {}
    correct = 0
    for stream, label in samples:
        result = run_inference(stream, config, model)
        confusion[(label, result.predicted)] = (
            confusion.get((label, result.predicted), 0) + 1
        )
        per_class[label] = per_class.get(label, 0) + 1
        if result.predicted == label:
            correct += 1
    total = len(samples)
    return BatchSummary(
        total=total,
        correct=correct,
        accuracy=correct / total if total else 0.0,
        confusion=confusion,
        per_class_counts=per_class,
    )
