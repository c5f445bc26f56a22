"""Run configuration: default detector banks, class suite, INI parsing.

The config file is a flat key=value document with section headers
(configparser syntax). Everything has a default tuned for a 128x128
sensor; any scalar can be overridden, and whole spatial banks can be
replaced by explicit region lines.
"""

from __future__ import annotations

import configparser
import os
from dataclasses import dataclass, field
from typing import Optional

from .errors import ConfigError
from .events import TRAJECTORY_KINDS, SyntheticGestureSpec
from .network import SGFModel, SGFUnit, UNIT_A_GROUPS
from .snn_spatial import Region, SpatialSNNParams
from .snn_temporal import (
    CLOCKWISE_PATTERN,
    COUNTER_CLOCKWISE_PATTERN,
    TOKEN_BOTTOM_UP,
    TOKEN_LEFT_RIGHT,
    TOKEN_RIGHT_LEFT,
    TOKEN_TOP_DOWN,
    TemporalFeatureConfig,
    TemporalPattern,
)
from .stcore import STCoreParams

ENV_CONFIG = "SGF_CONFIG"


@dataclass(frozen=True)
class BankScales:
    """Threshold knobs for the generated spatial banks.

    Intensity gates are absolute accumulated-frame counts; area gates
    are fractions of the region area.
    """

    intense_theta_i: int = 25
    intense_area_frac: float = 0.02
    plateau_theta_i: int = 2
    plateau_area_frac: float = 0.40
    ring_theta_i: int = 2
    ring_area_frac: float = 0.25


@dataclass(frozen=True)
class RunConfig:
    geometry: tuple[int, int] = (128, 128)
    spikes_per_frame: int = 1000
    similarity: str = "nor"
    st_params: dict = field(
        default_factory=lambda: {
            "A": STCoreParams(1, 2, 2, 2),
            "B": STCoreParams(1, 2, 2, 2),
            "C": STCoreParams(1, 2, 2, 2),
        }
    )
    min_run: int = 3
    dominant_min_run: int = 5
    theta_te: int = 2
    temporal_variants: int = 80
    bank_scales: BankScales = BankScales()
    fifo_capacity: int = 64
    unit_a_spatial: Optional[list[SpatialSNNParams]] = None
    unit_c_spatial: Optional[list[SpatialSNNParams]] = None
    #: defaults for the synthetic generator, from the [gen] section
    gen_defaults: dict = field(default_factory=dict)

    def validate(self) -> None:
        w, h = self.geometry
        if w <= 0 or h <= 0:
            raise ConfigError("geometry.width/height", f"degenerate {w}x{h}")
        if self.spikes_per_frame < 1:
            raise ConfigError("frames.spikes_per_frame", "must be >= 1")
        if self.similarity not in ("nor", "xnor"):
            raise ConfigError("similarity.operator", "must be 'nor' or 'xnor'")
        if self.min_run < 1:
            raise ConfigError("temporal.min_run", "must be >= 1")
        if self.dominant_min_run < 1:
            raise ConfigError("temporal.dominant_min_run", "must be >= 1")
        if self.theta_te < 1:
            raise ConfigError("temporal.theta_te", "must be >= 1")
        if self.temporal_variants < 1:
            raise ConfigError("unit_b.variants", "must be >= 1")
        if self.fifo_capacity < 1:
            raise ConfigError("fifo.capacity", "must be >= 1")
        for unit_id, params in self.st_params.items():
            try:
                params.validate()
            except ValueError as exc:
                raise ConfigError(f"stcore.{unit_id}", str(exc)) from None


def _grid_regions(x0, y0, w, h, cols, rows):
    """Split a rectangle into cols x rows grid-aligned boxes, row-major."""
    xs = [x0 + (w * c) // cols for c in range(cols + 1)]
    ys = [y0 + (h * r) // rows for r in range(rows + 1)]
    out = []
    for r in range(rows):
        for c in range(cols):
            out.append(
                Region(xs[c], ys[r], xs[c + 1] - xs[c], ys[r + 1] - ys[r])
            )
    return out


def _intense(fid, region, scales: BankScales):
    theta_a = max(1, round(scales.intense_area_frac * region.width * region.height))
    theta_i = max(theta_a + 1, scales.intense_theta_i)
    return SpatialSNNParams(fid, region, theta_i, theta_a, "constrained-intensive")


def _plateau(fid, region, scales: BankScales):
    theta_a = max(
        scales.plateau_theta_i + 1,
        round(scales.plateau_area_frac * region.width * region.height),
    )
    return SpatialSNNParams(fid, region, scales.plateau_theta_i, theta_a, "plateau-mild")


def _ring_slot(fid, region, scales: BankScales):
    theta_a = max(
        scales.ring_theta_i + 1,
        round(scales.ring_area_frac * region.width * region.height),
    )
    return SpatialSNNParams(fid, region, scales.ring_theta_i, theta_a, "plateau-mild")


def default_unit_a_spatial(geometry, scales: BankScales) -> list[SpatialSNNParams]:
    """16 constrained + 18 plateau + 2 point slots tiling the two halves."""
    w, h = geometry
    half = w // 2
    bank = []
    a_regions = _grid_regions(0, 0, half, h, cols=2, rows=4)
    d_regions = _grid_regions(half, 0, w - half, h, cols=2, rows=4)
    for i, region in enumerate(a_regions, start=1):
        bank.append(_intense(f"A{i}", region, scales))
    for i, region in enumerate(d_regions, start=1):
        bank.append(_intense(f"D{i}", region, scales))
    b_regions = _grid_regions(0, 0, half, h, cols=3, rows=3)
    c_regions = _grid_regions(half, 0, w - half, h, cols=3, rows=3)
    for i, region in enumerate(b_regions, start=1):
        bank.append(_plateau(f"B{i}", region, scales))
    for i, region in enumerate(c_regions, start=1):
        bank.append(_plateau(f"C{i}", region, scales))
    side = max(4, w // 8)
    for i, cy in enumerate((h // 5, 4 * h // 5), start=1):
        region = Region(w // 2 - side // 2, cy - side // 2, side, side)
        bank.append(_intense(f"G{i}", region, scales))
    return bank


def default_unit_c_spatial(geometry, scales: BankScales) -> list[SpatialSNNParams]:
    """Location slots for the mixed group: two dwell boxes plus a ring."""
    w, h = geometry
    cx, cy = w // 2, h // 2
    box = max(8, w // 8)  # dwell boxes
    ring_r = round(0.17 * min(w, h))  # matches the roll radius
    long_side = max(12, round(0.19 * w))
    short_side = max(8, w // 8)
    bank = [
        _intense(
            "CC", Region(cx - box // 2, cy - box // 2, box, box), scales
        ),
        _intense(
            "CL",
            Region(
                round(0.22 * w) - box // 2, round(0.34 * h) - box // 2, box, box
            ),
            scales,
        ),
    ]
    ring = [
        ("RT", cx, cy - ring_r, long_side, short_side),
        ("RB", cx, cy + ring_r, long_side, short_side),
        ("RL", cx - ring_r, cy, short_side, long_side),
        ("RR", cx + ring_r, cy, short_side, long_side),
    ]
    for fid, x, y, rw, rh in ring:
        bank.append(
            _ring_slot(fid, Region(x - rw // 2, y - rh // 2, rw, rh), scales)
        )
    return bank


def _loop_variants(prefix: str, reference, count: int, theta_te: int, min_run: int):
    """Deterministic parameter spread for one loop-reference family."""
    te_spread = (
        theta_te,
        max(1, theta_te - 1),
        theta_te + 2,
        theta_te + 6,
        theta_te + 14,
    )
    variants = []
    k = 0
    while len(variants) < count:
        delta_t = 1 + k % 4
        theta_l = (k // 4) % 2
        te = te_spread[(k // 8) % len(te_spread)]
        run = (min_run, min_run + 1)[(k // 40) % 2]
        k += 1
        variants.append(
            TemporalFeatureConfig(
                f"{prefix}{len(variants) + 1:03d}",
                reference=reference,
                delta_t=delta_t,
                theta_l=theta_l,
                theta_te=te,
                min_run=run,
            )
        )
    return variants


def default_unit_b_temporal(cfg: RunConfig) -> list[TemporalFeatureConfig]:
    """A clockwise and a counter-clockwise family, `temporal_variants` each."""
    return _loop_variants(
        "E", CLOCKWISE_PATTERN, cfg.temporal_variants, cfg.theta_te, cfg.min_run
    ) + _loop_variants(
        "F", COUNTER_CLOCKWISE_PATTERN, cfg.temporal_variants, cfg.theta_te,
        cfg.min_run
    )


def default_unit_c_temporal(cfg: RunConfig) -> list[TemporalFeatureConfig]:
    refs = (
        ("H", TOKEN_TOP_DOWN),
        ("I", TOKEN_BOTTOM_UP),
        ("J", TOKEN_LEFT_RIGHT),
        ("K", TOKEN_RIGHT_LEFT),
    )
    return [
        TemporalFeatureConfig(
            fid,
            reference=TemporalPattern((token,)),
            delta_t=1,
            theta_l=0,
            theta_te=cfg.theta_te,
            min_run=cfg.dominant_min_run,
        )
        for fid, token in refs
    ]


def build_units(cfg: RunConfig) -> dict[str, SGFUnit]:
    cfg.validate()
    scales = cfg.bank_scales
    unit_a_bank = (
        cfg.unit_a_spatial
        if cfg.unit_a_spatial is not None
        else default_unit_a_spatial(cfg.geometry, scales)
    )
    unit_c_bank = (
        cfg.unit_c_spatial
        if cfg.unit_c_spatial is not None
        else default_unit_c_spatial(cfg.geometry, scales)
    )
    unit_a = SGFUnit(
        "A",
        cfg.st_params["A"],
        spatial_bank=unit_a_bank,
        targets=[g.label for g in UNIT_A_GROUPS],
    )
    unit_b = SGFUnit(
        "B",
        cfg.st_params["B"],
        temporal_bank=default_unit_b_temporal(cfg),
        targets=[4, 5, 6, 7],
    )
    unit_c = SGFUnit(
        "C",
        cfg.st_params["C"],
        spatial_bank=unit_c_bank,
        temporal_bank=default_unit_c_temporal(cfg),
        targets=[1, 2, 8, 9, 10],
    )
    return {"A": unit_a, "B": unit_b, "C": unit_c}


def build_model(cfg: RunConfig) -> SGFModel:
    return SGFModel(
        build_units(cfg),
        geometry=cfg.geometry,
        spikes_per_frame=cfg.spikes_per_frame,
        similarity=cfg.similarity,
    )


def default_class_specs(
    geometry=(128, 128), noise_density: float = 0.0
) -> dict[int, SyntheticGestureSpec]:
    """The 10-class synthetic gesture suite (ids follow the gesture list)."""
    w, h = geometry
    cx, cy = w / 2, h / 2
    wave_y = 0.34 * h
    arm_r = round(0.17 * min(w, h))

    def spec(kind, **kw):
        return SyntheticGestureSpec(
            kind,
            geometry=geometry,
            noise_density=noise_density,
            **kw,
        )

    return {
        1: spec("oscillate-small-area", center=(cx, cy)),
        2: spec("oscillate-small-area", center=(0.22 * w, wave_y)),
        3: spec("oscillate-small-area", center=(0.78 * w, wave_y)),
        4: spec("circular-cw", center=(0.69 * w, cy), amplitude=arm_r),
        5: spec("circular-ccw", center=(0.69 * w, cy), amplitude=arm_r),
        6: spec("circular-cw", center=(0.31 * w, cy), amplitude=arm_r),
        7: spec("circular-ccw", center=(0.31 * w, cy), amplitude=arm_r),
        8: spec("linear-up"),
        9: spec("linear-down"),
        10: spec("oscillate-large-area", center=(cx, cy), amplitude=0.31 * w),
    }


# -- INI parsing -------------------------------------------------------


def _get_int(parser, section, key, default):
    if not parser.has_option(section, key):
        return default
    try:
        return parser.getint(section, key)
    except ValueError:
        raise ConfigError(f"{section}.{key}", "must be an integer") from None


def _get_float(parser, section, key, default):
    if not parser.has_option(section, key):
        return default
    try:
        return parser.getfloat(section, key)
    except ValueError:
        raise ConfigError(f"{section}.{key}", "must be a number") from None


def _parse_gen_section(parser) -> dict:
    """Synthetic-generator defaults from the [gen] section."""
    if not parser.has_section("gen"):
        return {}
    out = {}
    if parser.has_option("gen", "kind"):
        kind = parser.get("gen", "kind").strip()
        if kind not in TRAJECTORY_KINDS:
            raise ConfigError("gen.kind", f"unknown trajectory kind {kind!r}")
        out["kind"] = kind
    for key, cast in (
        ("blob_radius", int),
        ("events_per_frame", int),
        ("frame_count", int),
        ("noise_density", float),
        ("amplitude", float),
        ("cycles", float),
    ):
        if parser.has_option("gen", key):
            try:
                out[key] = cast(parser.get("gen", key))
            except ValueError:
                raise ConfigError(
                    f"gen.{key}", f"must be {cast.__name__}"
                ) from None
    if parser.has_option("gen", "center"):
        raw = parser.get("gen", "center")
        try:
            cx, cy = (float(v) for v in raw.split(","))
        except ValueError:
            raise ConfigError("gen.center", "must be 'x,y'") from None
        out["center"] = (cx, cy)
    return out


def _parse_spatial_section(parser, section, geometry):
    bank = []
    for fid, raw in parser.items(section):
        parts = [p.strip() for p in raw.split(",")]
        if len(parts) != 7:
            raise ConfigError(
                f"{section}.{fid}",
                "expected 'x,y,width,height,theta_i,theta_a,archetype'",
            )
        try:
            region = Region(*(int(v) for v in parts[:4]))
            params = SpatialSNNParams(
                fid.upper(), region, int(parts[4]), int(parts[5]), parts[6]
            )
            params.validate(geometry)
        except Exception as exc:
            raise ConfigError(f"{section}.{fid}", str(exc)) from None
        bank.append(params)
    return bank


def parse_config(text: str) -> RunConfig:
    """Parse an INI config document into a validated RunConfig."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ConfigError("(document)", str(exc)) from None

    base = RunConfig()
    geometry = (
        _get_int(parser, "geometry", "width", base.geometry[0]),
        _get_int(parser, "geometry", "height", base.geometry[1]),
    )
    st_params = {}
    for unit_id in ("A", "B", "C"):
        section = f"stcore.{unit_id}"
        default = base.st_params[unit_id]
        st_params[unit_id] = STCoreParams(
            _get_int(parser, section, "delta_s", default.delta_s),
            _get_int(parser, section, "theta_s", default.theta_s),
            _get_int(parser, section, "delta_t", default.delta_t),
            _get_int(parser, section, "theta_t", default.theta_t),
        )
    similarity = (
        parser.get("similarity", "operator", fallback=base.similarity)
        .strip()
        .lower()
    )
    scales = BankScales(
        intense_theta_i=_get_int(parser, "banks", "intense_theta_i",
                                 base.bank_scales.intense_theta_i),
        intense_area_frac=_get_float(parser, "banks", "intense_area_frac",
                                     base.bank_scales.intense_area_frac),
        plateau_theta_i=_get_int(parser, "banks", "plateau_theta_i",
                                 base.bank_scales.plateau_theta_i),
        plateau_area_frac=_get_float(parser, "banks", "plateau_area_frac",
                                     base.bank_scales.plateau_area_frac),
        ring_theta_i=_get_int(parser, "banks", "ring_theta_i",
                              base.bank_scales.ring_theta_i),
        ring_area_frac=_get_float(parser, "banks", "ring_area_frac",
                                  base.bank_scales.ring_area_frac),
    )
    cfg = RunConfig(
        geometry=geometry,
        spikes_per_frame=_get_int(parser, "frames", "spikes_per_frame",
                                  base.spikes_per_frame),
        similarity=similarity,
        st_params=st_params,
        min_run=_get_int(parser, "temporal", "min_run", base.min_run),
        dominant_min_run=_get_int(parser, "temporal", "dominant_min_run",
                                  base.dominant_min_run),
        theta_te=_get_int(parser, "temporal", "theta_te", base.theta_te),
        temporal_variants=_get_int(parser, "unit_b", "variants",
                                   base.temporal_variants),
        bank_scales=scales,
        fifo_capacity=_get_int(parser, "fifo", "capacity", base.fifo_capacity),
        unit_a_spatial=(
            _parse_spatial_section(parser, "unit_a.spatial", geometry)
            if parser.has_section("unit_a.spatial")
            else None
        ),
        unit_c_spatial=(
            _parse_spatial_section(parser, "unit_c.spatial", geometry)
            if parser.has_section("unit_c.spatial")
            else None
        ),
        gen_defaults=_parse_gen_section(parser),
    )
    cfg.validate()
    return cfg


def load_config(path: Optional[str] = None) -> RunConfig:
    """Load a config file; falls back to $SGF_CONFIG, then to defaults."""
    if path is None:
        path = os.environ.get(ENV_CONFIG)
    if path is None:
        cfg = RunConfig()
        cfg.validate()
        return cfg
    if not os.path.exists(path):
        raise ConfigError("(path)", f"config file not found: {path}")
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())
