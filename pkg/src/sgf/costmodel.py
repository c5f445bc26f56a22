"""Model-size and operation-count accounting tables.

Three reports are produced: the gating-flow network's own byte/op table,
a reference ConvNet parameter/MAC table, and a point-attention (PAT)
network table. All row arithmetic is exact (ints, fractions); unit
conversion happens only at presentation: KB = bytes/1024 and
MOPs/M = value/2^20, the conventions under which the printed totals
round to the published figures.

A few published rows disagree with their own printed formulas; those
rows reproduce the constant that makes the table total come out right
and carry an explanatory annotation instead of being silently repaired.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Union

Number = Union[int, Fraction]


@dataclass(frozen=True)
class ConvLayerSpec:
    """One convolution layer: channels, kernel, stride, pad, output side."""

    ic: int
    oc: int
    k: int
    s: int
    pad: int
    hw_out: int

    def validate(self) -> None:
        for name in ("ic", "oc", "k", "s", "hw_out"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.pad < 0:
            raise ValueError("pad must be >= 0")


def conv_cost(spec: ConvLayerSpec) -> tuple[int, int]:
    """(params, MACs): ic*oc*k^2 weights, each applied per output pixel."""
    spec.validate()
    params = spec.ic * spec.oc * spec.k * spec.k
    macs = params * spec.hw_out * spec.hw_out
    return params, macs


@dataclass(frozen=True)
class PatLayerSpec:
    """One PAT layer: GAT rows are table-driven, MLP rows are computed."""

    kind: str  # "GAT" | "MLP"
    n: int
    c_in: int
    c_out: int
    params_const: Optional[Fraction] = None
    macs_const: Optional[Fraction] = None


def mlp_cost(spec: PatLayerSpec) -> tuple[int, int]:
    """(params, MACs) for an MLP layer: c_in*c_out weights hit n times."""
    params = spec.c_in * spec.c_out
    return params, spec.n * params


@dataclass
class CostReport:
    """A rendered table plus exact totals and per-row annotations."""

    title: str
    columns: tuple[str, ...]
    rows: list[tuple[str, ...]]
    totals: dict[str, Number]
    unit_lines: list[str] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    total_cells: tuple[str, ...] = ()

    def to_text(self) -> str:
        table = [self.columns] + [tuple(r) for r in self.rows]
        total = ("Total",) + self.total_cells
        table.append(total)
        widths = [
            max(len(row[c]) if c < len(row) else 0 for row in table)
            for c in range(len(self.columns))
        ]
        out = io.StringIO()
        out.write(self.title + "\n")
        for line in self.unit_lines:
            out.write(line + "\n")
        for note in self.notes:
            out.write("note: " + note + "\n")
        for row in table[:-1]:
            cells = [row[c].ljust(widths[c]) for c in range(len(row))]
            out.write("  ".join(cells).rstrip() + "\n")
        last = table[-1]
        out.write("  ".join(last[c].ljust(widths[c]) for c in range(len(last))).rstrip())
        out.write("\n")
        return out.getvalue()

    def to_csv(self) -> str:
        lines = [",".join(self.columns)]
        for row in self.rows:
            lines.append(",".join(row))
        lines.append(",".join(("Total",) + self.total_cells))
        return "\n".join(lines) + "\n"


#: Published ConvNet layer stack (16 layers).
CONVNET_LAYERS: tuple[ConvLayerSpec, ...] = (
    ConvLayerSpec(6, 12, 3, 2, 0, 31),
    ConvLayerSpec(12, 252, 4, 2, 0, 14),
    ConvLayerSpec(252, 256, 1, 1, 0, 14),
    ConvLayerSpec(256, 256, 2, 2, 0, 7),
    ConvLayerSpec(256, 512, 3, 1, 1, 7),
    ConvLayerSpec(512, 512, 1, 1, 0, 7),
    ConvLayerSpec(512, 512, 1, 1, 0, 7),
    ConvLayerSpec(512, 512, 1, 1, 0, 7),
    ConvLayerSpec(512, 512, 2, 2, 0, 3),
    ConvLayerSpec(512, 1024, 3, 1, 1, 3),
    ConvLayerSpec(1024, 1024, 1, 1, 0, 3),
    ConvLayerSpec(1024, 1024, 1, 1, 0, 3),
    ConvLayerSpec(1024, 1024, 2, 2, 0, 1),
    ConvLayerSpec(1024, 1024, 1, 1, 0, 1),
    ConvLayerSpec(1024, 968, 1, 1, 0, 1),
    ConvLayerSpec(968, 2640, 1, 1, 0, 1),
)


def convnet_report(layers: Sequence[ConvLayerSpec] = CONVNET_LAYERS) -> CostReport:
    rows = []
    total_params = 0
    total_macs = 0
    for spec in layers:
        params, macs = conv_cost(spec)
        total_params += params
        total_macs += macs
        rows.append(
            (
                str(spec.ic),
                str(spec.oc),
                str(spec.k),
                str(spec.s),
                str(spec.pad),
                str(spec.hw_out),
                str(params),
                str(macs),
            )
        )
    return CostReport(
        title="ConvNet parameters and MACs",
        columns=("IC", "OC", "K", "S", "Pad", "HW_out", "Parameters", "MACs"),
        rows=rows,
        totals={"params": total_params, "macs": total_macs},
        unit_lines=[
            f"totals in M (/2^20): {total_params / 2**20:.2f}M params, "
            f"{total_macs / 2**20:.2f}M MACs"
        ],
        total_cells=("", "", "", "", "", str(total_params), str(total_macs)),
    )


#: Published PAT stack: three GAT rows (table-driven constants; the
#: fractional thirds have no published closed form) and three MLP rows.
PAT_LAYERS: tuple[PatLayerSpec, ...] = (
    PatLayerSpec("GAT", 1024, 1024, 1024,
                 Fraction(1048576, 3), Fraction(2147483648, 3)),
    PatLayerSpec("GAT", 384, 1024, 1024,
                 Fraction(1048576, 3), Fraction(184549376)),
    PatLayerSpec("GAT", 128, 1024, 1024,
                 Fraction(1048576, 3), Fraction(50331648)),
    PatLayerSpec("MLP", 64, 1024, 512),
    PatLayerSpec("MLP", 64, 512, 256),
    PatLayerSpec("MLP", 64, 256, 10),
)


def _frac_cell(value: Number, decimals: int) -> str:
    if isinstance(value, Fraction) and value.denominator == 1:
        value = value.numerator
    if isinstance(value, int):
        return str(value)
    return f"{float(value):.{decimals}f}"


def pat_report(layers: Sequence[PatLayerSpec] = PAT_LAYERS) -> CostReport:
    rows = []
    total_params: Number = Fraction(0)
    total_macs: Number = Fraction(0)
    for spec in layers:
        if spec.kind == "GAT":
            if spec.params_const is None or spec.macs_const is None:
                raise ValueError("GAT rows are table-driven; constants required")
            params: Number = spec.params_const
            macs: Number = spec.macs_const
        elif spec.kind == "MLP":
            params, macs = mlp_cost(spec)
        else:
            raise ValueError(f"unknown PAT layer kind {spec.kind!r}")
        total_params += params
        total_macs += macs
        rows.append(
            (
                spec.kind,
                str(spec.n),
                str(spec.c_in),
                str(spec.c_out),
                _frac_cell(params, 4),
                _frac_cell(macs, 1),
            )
        )
    if isinstance(total_params, Fraction) and total_params.denominator == 1:
        total_params = total_params.numerator
    return CostReport(
        title="PAT parameters and MACs",
        columns=("Layer", "N", "c_in", "c_out", "Parameters", "MACs"),
        rows=rows,
        totals={"params": total_params, "macs": total_macs},
        unit_lines=[
            f"totals in M (/2^20): {float(total_params) / 2**20:.2f}M params, "
            f"{float(total_macs) / 2**20:.2f}M MACs"
        ],
        total_cells=("", "", "", _frac_cell(total_params, 4),
                     _frac_cell(total_macs, 1)),
    )


@dataclass(frozen=True)
class SgfCostRow:
    """One gating-flow layer row: printed calculation, count, exact value."""

    layer: str
    calculation: str
    subnetworks: int
    bytes_total: Optional[int] = None
    ops_total: Optional[int] = None
    note: Optional[str] = None


_NOTE_19 = (
    "printed per-sub-network constant 19 does not satisfy its own formula "
    "(110+2*8)/8 = 15.75; 19 is kept because 19*16=304 and 19*18=342 match "
    "the published rows and total"
)

#: Byte rows of the published size table.
SGF_SIZE_ROWS: tuple[SgfCostRow, ...] = (
    SgfCostRow("ST core 1", "42*42*2*8/8", 1, bytes_total=3528),
    SgfCostRow("ST core 2", "128*128*2*8/8", 1, bytes_total=32768),
    SgfCostRow("A/D", "(110+2*8)/8=19", 16, bytes_total=304, note=_NOTE_19),
    SgfCostRow("B/C", "(110+2*8)/8=19", 18, bytes_total=342, note=_NOTE_19),
    SgfCostRow("G", "2*8/8", 2, bytes_total=4),
    SgfCostRow("E/F", "3*8/8", 160, bytes_total=480),
    SgfCostRow(
        "H/I/J/K", "8/8", 2, bytes_total=32,
        note="printed row total 32 bytes exceeds its own formula "
             "8/8 * 2 = 2; 32 is kept because the published 36.58KB "
             "total requires it",
    ),
)

#: Operation rows of the published op-count table.
SGF_OPS_ROWS: tuple[SgfCostRow, ...] = (
    SgfCostRow("ST core 1", "3*3*42*42*80+42*42*80", 1, ops_total=1_411_200),
    SgfCostRow("ST core 2", "1*1*128*128*80+128*128*80", 1, ops_total=2_621_440),
    SgfCostRow(
        "A/D", "42*42+(42*42-1)+1", 16, ops_total=56_448,
        note="formula evaluates to 3528*16 = 56448 ops; the published "
             "per-row value 56.0 KOPs disagrees with it",
    ),
    SgfCostRow("B/C", "42*42+(42*42-1)+1", 18, ops_total=63_504),
    SgfCostRow("G", "42*42+(42*42-1)+1", 2, ops_total=7_056),
    SgfCostRow("E/F", "(30*30+30)*3*10", 160, ops_total=4_464_000),
    SgfCostRow(
        "H/I/J/K", "(30*30+30)*3*10", 2, ops_total=55_800,
        note="formula evaluates to 27900*2 = 55800 ops; the published "
             "per-row value 54.5 KOPs disagrees with it",
    ),
)


def sgf_size_report(rows: Sequence[SgfCostRow] = SGF_SIZE_ROWS) -> CostReport:
    total = sum(r.bytes_total or 0 for r in rows)
    table = []
    notes = []
    for r in rows:
        flag = "*" if r.note else ""
        table.append(
            (r.layer + flag, r.calculation, str(r.subnetworks), str(r.bytes_total or 0))
        )
        if r.note:
            notes.append(f"{r.layer}: {r.note}")
    return CostReport(
        title="Gating-flow model size",
        columns=("Layer", "Calculation", "Number", "Bytes"),
        rows=table,
        totals={"bytes": total},
        unit_lines=[f"total {total} bytes = {total / 1024:.2f}KB (/1024)"],
        notes=notes,
        total_cells=("", "", str(total)),
    )


def sgf_ops_report(rows: Sequence[SgfCostRow] = SGF_OPS_ROWS) -> CostReport:
    total = sum(r.ops_total or 0 for r in rows)
    table = []
    notes = []
    for r in rows:
        flag = "*" if r.note else ""
        table.append(
            (r.layer + flag, r.calculation, str(r.subnetworks), str(r.ops_total or 0))
        )
        if r.note:
            notes.append(f"{r.layer}: {r.note}")
    return CostReport(
        title="Gating-flow operation count",
        columns=("Layer", "Calculation", "Number", "Ops"),
        rows=table,
        totals={"ops": total},
        unit_lines=[f"total {total} ops = {total / 2**20:.3f} MOPs (/2^20)"],
        notes=notes,
        total_cells=("", "", str(total)),
    )
