"""Gating-flow network: units, feature vectors, one-pass histogram training.

A unit bundles a filter configuration with banks of spatial/temporal
sub-networks; the bits of the sub-networks that fired form the sample's
feature vector. Training is a single counting pass: each distinct
(class, vector) pair owns a stored prototype whose histogram increments
on every hit, and weights are the normalized histograms. Scoring
compares the test vector against every stored prototype bitwise (NOR by
default, XNOR selectable) and the class hierarchy routes coarse groups
to the unit that discriminates them.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import SGFError, StreamFormatError, UntrainedRouteError
from .events import EventStream, Frame, bin_frames
from .snn_spatial import SpatialSNNParams, accumulate, spatial_response
from .snn_temporal import (
    TemporalFeatureConfig,
    evaluate_temporal_features,
)
from .stcore import STCoreParams, st_filter

#: Class ids and names; 8 is the arm roll.
CLASS_NAMES = {
    1: "hand clap",
    2: "left hand wave",
    3: "right hand wave",
    4: "right arm clockwise",
    5: "right arm counter clockwise",
    6: "left arm clockwise",
    7: "left arm counter clockwise",
    8: "arm roll",
    9: "air drum",
    10: "air guitar",
}

SIMILARITY_OPERATORS = ("nor", "xnor")


@dataclass(frozen=True)
class RouteGroup:
    """A coarse class group the first-stage unit can select."""

    label: str
    members: tuple[int, ...]


#: First-stage groups in deterministic tie order (lowest member id first).
UNIT_A_GROUPS = (
    RouteGroup("1+2+8+9+10", (1, 2, 8, 9, 10)),
    RouteGroup("3", (3,)),
    RouteGroup("4+5", (4, 5)),
    RouteGroup("6+7", (6, 7)),
)


def group_of(class_id: int) -> RouteGroup:
    for group in UNIT_A_GROUPS:
        if class_id in group.members:
            return group
    raise SGFError(f"class id {class_id} outside 1..10")


@dataclass(frozen=True)
class FeatureVector:
    """Fixed-order bit string over one unit's feature slots."""

    length: int
    bits: int

    def __post_init__(self):
        if self.length < 1:
            raise ValueError("feature vector must have at least one slot")
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError("bits outside the declared slot count")

    @classmethod
    def from_bits(cls, values: Sequence[int]) -> "FeatureVector":
        mask = 0
        for k, v in enumerate(values):
            if v not in (0, 1):
                raise ValueError("feature bits must be 0 or 1")
            mask |= v << k
        return cls(len(values), mask)

    @classmethod
    def from_string(cls, text: str) -> "FeatureVector":
        return cls.from_bits([int(c) for c in text])

    def to_string(self) -> str:
        return "".join("1" if self.bits >> k & 1 else "0" for k in range(self.length))

    def popcount(self) -> int:
        return self.bits.bit_count()

    def __str__(self) -> str:
        return self.to_string()


@dataclass
class GlobalFeatureNeuron:
    """Stored prototype: one distinct feature vector with its hit count."""

    vector: FeatureVector
    histogram: int = 1


@dataclass
class OutputNeuron:
    """Per-target collection of stored prototypes and normalized weights."""

    label: object  # class id (int) or group label (str)
    neurons: list[GlobalFeatureNeuron] = field(default_factory=list)
    weights: Optional[list[float]] = None

    def observe(self, vector: FeatureVector) -> None:
        for neuron in self.neurons:
            if neuron.vector == vector:
                neuron.histogram += 1
                return
        self.neurons.append(GlobalFeatureNeuron(vector))

    def distinct_vectors(self) -> int:
        return len(self.neurons)


def finalize_weights(output_neuron: OutputNeuron) -> None:
    """Normalize histograms into weights (they sum to 1)."""
    total = sum(n.histogram for n in output_neuron.neurons)
    if total == 0:
        output_neuron.weights = []
        return
    output_neuron.weights = [n.histogram / total for n in output_neuron.neurons]


def score(
    vector: FeatureVector, output_neuron: OutputNeuron, operator: str = "nor"
) -> float:
    """Weighted bitwise similarity of the test vector to stored prototypes.

    'nor' counts positions where both vectors are 0 (the default reading);
    'xnor' counts all matching positions.
    """
    if operator not in SIMILARITY_OPERATORS:
        raise SGFError(f"unknown similarity operator {operator!r}")
    if output_neuron.weights is None:
        raise SGFError("output neuron is not finalized; call finalize_weights")
    full = None
    total = 0.0
    for neuron, weight in zip(output_neuron.neurons, output_neuron.weights):
        stored = neuron.vector
        if stored.length != vector.length:
            raise SGFError(
                f"feature vector length {vector.length} does not match "
                f"stored length {stored.length}"
            )
        if full is None:
            full = (1 << vector.length) - 1
        if operator == "nor":
            matches = (~(stored.bits | vector.bits) & full).bit_count()
        else:
            matches = (~(stored.bits ^ vector.bits) & full).bit_count()
        total += weight * matches / vector.length
    return total


class SGFUnit:
    """One hierarchy node: filter config, sub-network banks, output neurons."""

    def __init__(
        self,
        unit_id: str,
        st_params: STCoreParams,
        spatial_bank: Sequence[SpatialSNNParams] = (),
        temporal_bank: Sequence[TemporalFeatureConfig] = (),
        targets: Sequence[object] = (),
    ):
        self.unit_id = unit_id
        self.st_params = st_params
        self.spatial_bank = list(spatial_bank)
        self.temporal_bank = list(temporal_bank)
        self.targets = list(targets)
        self.outputs: dict[object, OutputNeuron] = {}
        ids = self.slot_ids()
        if len(set(ids)) != len(ids):
            raise SGFError(f"unit {unit_id}: duplicate feature ids in banks")

    def slot_ids(self) -> tuple[str, ...]:
        return tuple(
            [p.feature_id for p in self.spatial_bank]
            + [c.feature_id for c in self.temporal_bank]
        )

    @property
    def vector_length(self) -> int:
        return len(self.spatial_bank) + len(self.temporal_bank)

    def tie_rank(self, label: object) -> int:
        return self.targets.index(label)

    def output(self, label: object) -> OutputNeuron:
        if label not in self.targets:
            raise SGFError(f"unit {self.unit_id} does not handle target {label!r}")
        if label not in self.outputs:
            self.outputs[label] = OutputNeuron(label)
        return self.outputs[label]


def extract_feature_vector(
    unit: SGFUnit, st_frames: Sequence[np.ndarray]
) -> FeatureVector:
    """Feature bits from already-filtered frames, in canonical slot order."""
    if len(st_frames) == 0:
        raise SGFError("cannot extract features from zero frames")
    bits: list[int] = []
    if unit.spatial_bank:
        counts = accumulate(st_frames)
        h, w = counts.shape
        for params in unit.spatial_bank:
            params.validate((w, h))
            bits.append(spatial_response(counts, params))
    if unit.temporal_bank:
        fired = evaluate_temporal_features(st_frames, unit.temporal_bank)
        bits.extend(fired[cfg.feature_id] for cfg in unit.temporal_bank)
    return FeatureVector.from_bits(bits)


def train_sample(unit: SGFUnit, vector: FeatureVector, label: object) -> None:
    """Single counting update for one (vector, target) observation."""
    if vector.length != unit.vector_length:
        raise SGFError(
            f"vector length {vector.length} does not match unit "
            f"{unit.unit_id} slot count {unit.vector_length}"
        )
    unit.output(label).observe(vector)


def classify(
    unit: SGFUnit,
    vector: FeatureVector,
    operator: str = "nor",
    restrict: Optional[Sequence[object]] = None,
) -> object:
    """Argmax over output-neuron scores; exact ties go to the lowest target."""
    labels = [
        lab
        for lab in unit.targets
        if lab in unit.outputs and (restrict is None or lab in restrict)
    ]
    if not labels:
        raise UntrainedRouteError(
            f"unit {unit.unit_id} has no trained outputs"
            + (f" among {list(restrict)}" if restrict is not None else "")
        )
    best_label = None
    best = (-1.0, 0)
    for lab in labels:
        s = score(vector, unit.outputs[lab], operator)
        key = (s, -unit.tie_rank(lab))
        if key > best:
            best = key
            best_label = lab
    return best_label


@dataclass
class RouteStep:
    unit_id: str
    vector: FeatureVector
    scores: dict[object, float]
    selected: object


@dataclass
class RouteResult:
    predicted: int
    steps: list[RouteStep]


class SGFModel:
    """The trained network: three units plus run-wide settings."""

    def __init__(
        self,
        units: dict[str, SGFUnit],
        geometry: tuple[int, int],
        spikes_per_frame: int = 1000,
        similarity: str = "nor",
    ):
        if similarity not in SIMILARITY_OPERATORS:
            raise SGFError(f"unknown similarity operator {similarity!r}")
        self.units = units
        self.geometry = (int(geometry[0]), int(geometry[1]))
        self.spikes_per_frame = int(spikes_per_frame)
        self.similarity = similarity
        self.finalized = False
        #: training log rows: (unit_id, label, trial_index, distinct_count)
        self.knowledge_log: list[tuple[str, object, int, int]] = []
        #: every trained observation in arrival order: (unit_id, label, vector)
        self.vector_log: list[tuple[str, object, FeatureVector]] = []
        self._trial_counts: dict[tuple[str, object], int] = {}

    # -- training -----------------------------------------------------

    def units_for_class(self, class_id: int) -> list[tuple[SGFUnit, object]]:
        """(unit, target-label) pairs a sample of this class trains."""
        group = group_of(class_id)
        pairs: list[tuple[SGFUnit, object]] = [(self.units["A"], group.label)]
        if group.label in ("4+5", "6+7"):
            pairs.append((self.units["B"], class_id))
        elif group.label == "1+2+8+9+10":
            pairs.append((self.units["C"], class_id))
        return pairs

    def filtered_frames(
        self, frames: Sequence[Frame], unit: SGFUnit
    ) -> list[np.ndarray]:
        return st_filter(frames, unit.st_params)

    def train_stream(self, stream: EventStream, class_id: int) -> None:
        if self.finalized:
            raise SGFError("model already finalized; training is single-pass")
        frames = bin_frames(stream, self.spikes_per_frame)
        if not frames:
            raise StreamFormatError(
                f"stream too short: {len(stream)} events do not fill one frame"
            )
        st_cache: dict[STCoreParams, list[np.ndarray]] = {}
        for unit, label in self.units_for_class(class_id):
            if unit.st_params not in st_cache:
                st_cache[unit.st_params] = self.filtered_frames(frames, unit)
            vector = extract_feature_vector(unit, st_cache[unit.st_params])
            train_sample(unit, vector, label)
            self.vector_log.append((unit.unit_id, label, vector))
            key = (unit.unit_id, label)
            self._trial_counts[key] = self._trial_counts.get(key, 0) + 1
            self.knowledge_log.append(
                (
                    unit.unit_id,
                    label,
                    self._trial_counts[key],
                    unit.outputs[label].distinct_vectors(),
                )
            )

    def finalize(self) -> None:
        for unit in self.units.values():
            for neuron in unit.outputs.values():
                finalize_weights(neuron)
        self.finalized = True

    # -- inference ----------------------------------------------------

    def route_frames(self, frames: Sequence[Frame]) -> RouteResult:
        if not self.finalized:
            raise SGFError("model must be finalized before inference")
        if not frames:
            raise StreamFormatError("no frames to classify")
        unit_a = self.units["A"]
        st_cache: dict[STCoreParams, list[np.ndarray]] = {}

        def vector_for(unit: SGFUnit) -> FeatureVector:
            if unit.st_params not in st_cache:
                st_cache[unit.st_params] = self.filtered_frames(frames, unit)
            return extract_feature_vector(unit, st_cache[unit.st_params])

        va = vector_for(unit_a)
        scores_a = {
            lab: score(va, unit_a.outputs[lab], self.similarity)
            for lab in unit_a.targets
            if lab in unit_a.outputs
        }
        group_label = classify(unit_a, va, self.similarity)
        steps = [RouteStep("A", va, scores_a, group_label)]

        group = next(g for g in UNIT_A_GROUPS if g.label == group_label)
        if group.label == "3":
            return RouteResult(3, steps)

        unit = self.units["B"] if group.label in ("4+5", "6+7") else self.units["C"]
        vector = vector_for(unit)
        trained = [
            lab for lab in group.members if lab in unit.outputs
        ]
        if not trained:
            raise UntrainedRouteError(
                f"route {group.label} reached unit {unit.unit_id} "
                "with no trained outputs"
            )
        scores_u = {
            lab: score(vector, unit.outputs[lab], self.similarity)
            for lab in trained
        }
        selected = classify(unit, vector, self.similarity, restrict=group.members)
        steps.append(RouteStep(unit.unit_id, vector, scores_u, selected))
        return RouteResult(int(selected), steps)

    def classify_stream(self, stream: EventStream) -> RouteResult:
        frames = bin_frames(stream, self.spikes_per_frame)
        return self.route_frames(frames)


def route_hierarchy(frames: Sequence[Frame], model: SGFModel) -> int:
    """Predicted class id for binned frames, through the unit hierarchy."""
    return model.route_frames(frames).predicted


def online_learn(
    samples: Iterable[tuple[EventStream, int]], model: SGFModel
) -> SGFModel:
    """One training pass in arrival order, then weight finalization."""
    for stream, class_id in samples:
        model.train_stream(stream, class_id)
    model.finalize()
    return model


#: Unit whose stored vectors discriminate each class id.
_REPORT_UNIT = {3: "A", 4: "B", 5: "B", 6: "B", 7: "B"}


def feature_vector_dump(model: SGFModel) -> str:
    """Training vectors, one bit-string per line with its trained label."""
    return "".join(
        f"{vector.to_string()},{label}\n"
        for _, label, vector in model.vector_log
    )


def knowledge_report(model: SGFModel) -> list[tuple[int, int, int]]:
    """(trial, class, cumulative distinct-vector count) rows per class.

    Classes are reported at the unit that finally discriminates them
    (group-of-3 at the first stage, 4..7 at unit B, the rest at unit C).
    """
    rows: list[tuple[int, int, int]] = []
    for unit_id, label, trial, distinct in model.knowledge_log:
        if isinstance(label, int):
            if _REPORT_UNIT.get(label, "C") == unit_id:
                rows.append((trial, label, distinct))
        elif label == "3" and unit_id == "A":
            rows.append((trial, 3, distinct))
    rows.sort(key=lambda r: (r[1], r[0]))
    return rows
