"""Versioned, human-diffable text persistence for trained models.

The file records everything inference needs: run-wide settings, each
unit's filter parameters and sub-network banks, and per-target stored
vectors with histograms and weights. Weights are recomputed from the
histograms on load, so the printed floats are audit decoration, not the
ground truth.
"""

from __future__ import annotations

from .errors import SGFError
from .network import (
    FeatureVector,
    GlobalFeatureNeuron,
    SGFModel,
    SGFUnit,
)
from .snn_spatial import Region, SpatialSNNParams
from .snn_temporal import TemporalFeatureConfig, TemporalPattern
from .stcore import STCoreParams

FORMAT_HEADER = "sgf-model v1"


def _pattern_str(pattern: TemporalPattern) -> str:
    return ",".join(pattern.tokens)


def _pattern_parse(text: str) -> TemporalPattern:
    return TemporalPattern(tuple(text.split(",")))


def save_model(model: SGFModel) -> str:
    if not model.finalized:
        raise SGFError("refusing to save a model before finalize()")
    lines = [FORMAT_HEADER]
    lines.append(f"similarity {model.similarity}")
    lines.append(f"geometry {model.geometry[0]} {model.geometry[1]}")
    lines.append(f"spikes_per_frame {model.spikes_per_frame}")
    for unit_id in sorted(model.units):
        unit = model.units[unit_id]
        p = unit.st_params
        lines.append(f"unit {unit_id}")
        lines.append(f"stcore {p.delta_s} {p.theta_s} {p.delta_t} {p.theta_t}")
        lines.append("targets " + " ".join(str(t) for t in unit.targets))
        for sp in unit.spatial_bank:
            r = sp.region
            lines.append(
                f"spatial {sp.feature_id} {r.x} {r.y} {r.width} {r.height} "
                f"{sp.theta_i} {sp.theta_a} {sp.archetype}"
            )
        for tc in unit.temporal_bank:
            lines.append(
                f"temporal {tc.feature_id} {tc.delta_t} {tc.theta_l} "
                f"{tc.theta_te} {tc.min_run} {_pattern_str(tc.reference)}"
            )
        for label in unit.targets:
            neuron = unit.outputs.get(label)
            if neuron is None:
                continue
            lines.append(f"output {label}")
            weights = neuron.weights or []
            for stored, weight in zip(neuron.neurons, weights):
                lines.append(
                    f"vector {stored.vector.to_string()} "
                    f"{stored.histogram} {weight!r}"
                )
        lines.append("end")
    lines.append("end model")
    return "\n".join(lines) + "\n"


def load_model(text: str) -> SGFModel:
    lines = [ln.rstrip("\n") for ln in text.splitlines()]
    if not lines or lines[0].strip() != FORMAT_HEADER:
        raise SGFError(f"model file must start with '{FORMAT_HEADER}'")
    similarity = "nor"
    geometry = (128, 128)
    spikes_per_frame = 1000
    units: dict[str, SGFUnit] = {}

    i = 1
    # run-wide settings until the first unit
    while i < len(lines):
        parts = lines[i].split()
        if not parts:
            i += 1
            continue
        if parts[0] == "unit":
            break
        if parts[0] == "similarity":
            similarity = parts[1]
        elif parts[0] == "geometry":
            geometry = (int(parts[1]), int(parts[2]))
        elif parts[0] == "spikes_per_frame":
            spikes_per_frame = int(parts[1])
        elif parts[0] == "end" and parts[1:] == ["model"]:
            break
        else:
            raise SGFError(f"model file: unexpected line {lines[i]!r}")
        i += 1

    def parse_target(unit_id: str, token: str):
        return token if unit_id == "A" else int(token)

    while i < len(lines):
        parts = lines[i].split()
        if not parts:
            i += 1
            continue
        if parts == ["end", "model"]:
            break
        if parts[0] != "unit":
            raise SGFError(f"model file: expected 'unit', got {lines[i]!r}")
        unit_id = parts[1]
        st_params = None
        targets: list[object] = []
        spatial_bank = []
        temporal_bank = []
        pending: list[tuple[object, list[GlobalFeatureNeuron]]] = []
        i += 1
        while i < len(lines):
            parts = lines[i].split()
            if not parts:
                i += 1
                continue
            if parts[0] == "end" and len(parts) == 1:
                i += 1
                break
            if parts[0] == "stcore":
                st_params = STCoreParams(*(int(v) for v in parts[1:5]))
            elif parts[0] == "targets":
                targets = [parse_target(unit_id, t) for t in parts[1:]]
            elif parts[0] == "spatial":
                spatial_bank.append(
                    SpatialSNNParams(
                        feature_id=parts[1],
                        region=Region(*(int(v) for v in parts[2:6])),
                        theta_i=int(parts[6]),
                        theta_a=int(parts[7]),
                        archetype=parts[8],
                    )
                )
            elif parts[0] == "temporal":
                temporal_bank.append(
                    TemporalFeatureConfig(
                        feature_id=parts[1],
                        delta_t=int(parts[2]),
                        theta_l=int(parts[3]),
                        theta_te=int(parts[4]),
                        min_run=int(parts[5]),
                        reference=_pattern_parse(parts[6]),
                    )
                )
            elif parts[0] == "output":
                pending.append((parse_target(unit_id, parts[1]), []))
            elif parts[0] == "vector":
                if not pending:
                    raise SGFError("model file: 'vector' before any 'output'")
                vector = FeatureVector.from_string(parts[1])
                pending[-1][1].append(
                    GlobalFeatureNeuron(vector, histogram=int(parts[2]))
                )
            else:
                raise SGFError(f"model file: unexpected line {lines[i]!r}")
            i += 1
        if st_params is None:
            raise SGFError(f"model file: unit {unit_id} lacks an stcore line")
        unit = SGFUnit(
            unit_id,
            st_params,
            spatial_bank=spatial_bank,
            temporal_bank=temporal_bank,
            targets=targets,
        )
        for label, neurons in pending:
            out = unit.output(label)
            out.neurons = neurons
        units[unit_id] = unit

    model = SGFModel(
        units,
        geometry=geometry,
        spikes_per_frame=spikes_per_frame,
        similarity=similarity,
    )
    model.finalize()
    return model
