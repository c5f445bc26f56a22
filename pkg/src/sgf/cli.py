"""Command-line front end: gen, filter, train, infer, eval, cost, aer-dump.

Exit codes: 0 success, 1 usage error, 2 data/validation error. All
outputs are deterministic given the inputs, config, and seed.
"""

from __future__ import annotations

import argparse
import os
import sys
from dataclasses import replace
from typing import Optional

import numpy as np

from . import aer, costmodel, model_io
from .config import (
    RunConfig,
    build_model,
    default_class_specs,
    load_config,
)
from .errors import SGFError, StreamFormatError
from .events import (
    TRAJECTORY_KINDS,
    SyntheticGestureSpec,
    bin_frames,
    gen_synthetic,
    parse_event_stream,
    serialize_event_stream,
)
from .network import CLASS_NAMES, extract_feature_vector, online_learn
from .pipeline import PipelineConfig, run_batch, run_inference
from .snn_temporal import axis_location_traces, tokenize
from .stcore import STCoreParams, STRONG_PARAMS, WEAK_PARAMS, st_filter


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _read_text(path: str) -> str:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            return fh.read()
    except OSError as exc:
        raise SGFError(f"cannot read {path}: {exc.strerror}") from None


def _write_text(path: Optional[str], text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(text)
    except OSError as exc:
        raise SGFError(f"cannot write {path}: {exc.strerror}") from None


def _parse_geometry(text: str) -> tuple[int, int]:
    try:
        w, h = text.lower().split("x")
        return int(w), int(h)
    except ValueError:
        raise SGFError(f"geometry must look like 128x128, got {text!r}") from None


def _load_stream(path: str, geometry):
    return parse_event_stream(_read_text(path), geometry)


def _read_manifest(path: str) -> list[tuple[str, int]]:
    text = _read_text(path)
    base = os.path.dirname(os.path.abspath(path))
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.rsplit(",", 1)
        if len(parts) != 2:
            raise StreamFormatError(
                f"{path}: manifest line must be 'path,label'", line=lineno
            )
        rel, label_text = parts
        try:
            label = int(label_text)
        except ValueError:
            raise StreamFormatError(
                f"{path}: label {label_text!r} is not an integer", line=lineno
            ) from None
        sample_path = rel if os.path.isabs(rel) else os.path.join(base, rel)
        entries.append((sample_path, label))
    if not entries:
        raise SGFError(f"empty manifest: {path}")
    return entries


# -- gen ----------------------------------------------------------------


def _spec_from_args(args, cfg: RunConfig) -> SyntheticGestureSpec:
    geometry = _parse_geometry(args.geometry) if args.geometry else cfg.geometry
    gen = cfg.gen_defaults

    def pick(flag_value, key, builtin):
        if flag_value is not None:
            return flag_value
        return gen.get(key, builtin)

    center = pick(None, "center", None)
    if args.center:
        try:
            cx, cy = args.center.split(",")
            center = (float(cx), float(cy))
        except ValueError:
            raise SGFError(f"--center must be 'x,y', got {args.center!r}") from None
    kind = pick(args.kind, "kind", None)
    if not kind:
        raise _UsageError("--kind is required (flag or [gen] config section)")
    return SyntheticGestureSpec(
        kind=kind,
        blob_radius=pick(args.blob_radius, "blob_radius", 6),
        events_per_frame=pick(args.rate, "events_per_frame", 900),
        noise_density=pick(args.noise, "noise_density", 0.0),
        frame_count=pick(args.frames, "frame_count", 64),
        geometry=geometry,
        center=center,
        amplitude=pick(args.amplitude, "amplitude", None),
        cycles=pick(args.cycles, "cycles", 1.0),
    )


def suite_seed(base_seed: int, class_id: int, index: int, test: bool) -> int:
    """Deterministic per-sample seed for the synthetic suite."""
    return base_seed * 100_003 + class_id * 1_009 + index * 2 + (1 if test else 0)


def cmd_gen(args) -> int:
    cfg = load_config(args.config)
    if args.suite:
        if not args.out_dir:
            raise _UsageError("--suite requires --out-dir")
        os.makedirs(args.out_dir, exist_ok=True)
        geometry = _parse_geometry(args.geometry) if args.geometry else cfg.geometry
        noise = args.noise
        if noise is None:
            noise = cfg.gen_defaults.get("noise_density", 0.0)
        specs = default_class_specs(geometry, noise_density=noise)
        manifests = {"train": [], "test": []}
        for class_id, spec in sorted(specs.items()):
            for split, count in (("train", args.train_per_class),
                                 ("test", args.test_per_class)):
                for k in range(count):
                    seed = suite_seed(args.seed, class_id, k, split == "test")
                    stream = gen_synthetic(spec, seed)
                    name = f"class{class_id:02d}_{split}_{k:03d}.txt"
                    _write_text(
                        os.path.join(args.out_dir, name),
                        serialize_event_stream(stream),
                    )
                    manifests[split].append(f"{name},{class_id}")
        for split, lines in manifests.items():
            _write_text(
                os.path.join(args.out_dir, f"{split}.manifest"),
                "\n".join(lines) + "\n",
            )
        print(
            f"wrote {len(manifests['train'])} train / "
            f"{len(manifests['test'])} test samples to {args.out_dir}"
        )
        return 0
    if not args.kind and "kind" not in cfg.gen_defaults:
        raise _UsageError("--kind is required (or use --suite)")
    spec = _spec_from_args(args, cfg)
    stream = gen_synthetic(spec, args.seed)
    _write_text(args.out, serialize_event_stream(stream))
    return 0


# -- filter -------------------------------------------------------------


def _write_pgm(path: str, grid: np.ndarray) -> None:
    h, w = grid.shape
    body = "\n".join(
        " ".join("255" if v else "0" for v in row) for row in grid
    )
    _write_text(path, f"P2\n{w} {h}\n255\n{body}\n")


def cmd_filter(args) -> int:
    cfg = load_config(args.config)
    geometry = _parse_geometry(args.geometry) if args.geometry else cfg.geometry
    stream = _load_stream(args.events, geometry)
    if args.params:
        try:
            ds, ts, dt, tt = (int(v) for v in args.params.split(","))
        except ValueError:
            raise SGFError(
                f"--params must be 'delta_s,theta_s,delta_t,theta_t', "
                f"got {args.params!r}"
            ) from None
        params = STCoreParams(ds, ts, dt, tt)
    else:
        params = STRONG_PARAMS if args.strength == "strong" else WEAK_PARAMS
    params.validate()
    for note in params.warnings():
        print(f"warning: {note}", file=sys.stderr)
    frames = bin_frames(stream, args.spikes_per_frame or cfg.spikes_per_frame)
    if not frames:
        raise SGFError("stream too short to fill a single frame")
    filtered = st_filter(frames, params)
    if args.format == "pgm":
        out_dir = args.out or "."
        os.makedirs(out_dir, exist_ok=True)
        for k, grid in enumerate(filtered):
            _write_pgm(os.path.join(out_dir, f"frame_{k:04d}.pgm"), grid)
        print(f"wrote {len(filtered)} PGM frames to {out_dir}")
    else:
        lines = []
        for k, grid in enumerate(filtered):
            ys, xs = np.nonzero(grid)
            lines.extend(f"{k},{x},{y},1" for x, y in zip(xs, ys))
        _write_text(args.out, "\n".join(lines) + ("\n" if lines else ""))
    return 0


# -- train / infer / eval ------------------------------------------------


def cmd_train(args) -> int:
    cfg = load_config(args.config)
    if args.similarity:
        cfg = replace(cfg, similarity=args.similarity)
    entries = _read_manifest(args.manifest)
    model = build_model(cfg)
    samples = (
        (_load_stream(path, cfg.geometry), label) for path, label in entries
    )
    online_learn(samples, model)
    _write_text(args.model_out, model_io.save_model(model))
    if args.knowledge_out:
        from .network import knowledge_report

        rows = knowledge_report(model)
        csv = "trial,class,distinct_vectors\n" + "\n".join(
            f"{trial},{cls},{count}" for trial, cls, count in rows
        )
        _write_text(args.knowledge_out, csv + "\n")
    if args.vectors_out:
        from .network import feature_vector_dump

        _write_text(args.vectors_out, feature_vector_dump(model))
    print(f"trained on {len(entries)} samples; model -> {args.model_out}")
    return 0


def _trace_lines(model, frames) -> list[str]:
    lines = []
    for unit_id in sorted(model.units):
        unit = model.units[unit_id]
        st_frames = st_filter(frames, unit.st_params)
        vector = extract_feature_vector(unit, st_frames)
        lines.append(f"unit {unit_id} vector {vector.to_string()}")
        ids = unit.slot_ids()
        active = [ids[k] for k in range(vector.length) if vector.bits >> k & 1]
        lines.append(
            f"unit {unit_id} active {','.join(active) if active else '(none)'}"
        )
        if unit.temporal_bank:
            ref = unit.temporal_bank[0]
            tv, th = axis_location_traces(
                st_frames, ref.delta_t, ref.theta_l, ref.theta_te
            )
            for t, (v, hh) in enumerate(zip(tv.values, th.values)):
                lines.append(
                    f"unit {unit_id} frame {t:03d} "
                    f"v={'-' if v is None else v} h={'-' if hh is None else hh}"
                )
            pattern = tokenize(tv, th, ref.min_run)
            seq = ",".join(pattern.tokens) if pattern.tokens else "(none)"
            lines.append(f"unit {unit_id} tokens {seq}")
    return lines


def cmd_infer(args) -> int:
    model = model_io.load_model(_read_text(args.model))
    cfg = load_config(args.config)
    stream = _load_stream(args.events, model.geometry)
    pipe_cfg = PipelineConfig(
        geometry=model.geometry,
        spikes_per_frame=model.spikes_per_frame,
        fifo_capacity=cfg.fifo_capacity,
    )
    result = run_inference(stream, pipe_cfg, model)
    out_lines: list[str] = []
    if args.format == "csv":
        out_lines.append("key,value")
        out_lines.append(f"predicted,{result.predicted}")
        out_lines.append(f"similarity,{result.similarity}")
        out_lines.append(f"path,{'>'.join(result.routing_path)}")
        for label in sorted(result.scores, key=str):
            out_lines.append(f"score.{label},{result.scores[label]:.6f}")
        out_lines.append(f"events_in,{result.stats.events_in}")
        out_lines.append(f"packets,{result.stats.packets_transferred}")
        out_lines.append(f"fifo_high_watermark,{result.stats.fifo_high_watermark}")
        out_lines.append(f"frames,{result.stats.frames_processed}")
    else:
        name = CLASS_NAMES.get(result.predicted, "?")
        out_lines.append(f"predicted: {result.predicted} ({name})")
        out_lines.append(f"similarity: {result.similarity}")
        out_lines.append("path: " + " -> ".join(result.routing_path))
        scores = " ".join(
            f"{label}:{value:.4f}"
            for label, value in sorted(result.scores.items(), key=lambda kv: str(kv[0]))
        )
        out_lines.append(f"scores: {scores}")
        st = result.stats
        out_lines.append(
            f"stats: events={st.events_in} packets={st.packets_transferred} "
            f"fifo_high={st.fifo_high_watermark} frames={st.frames_processed}"
        )
    if args.trace:
        frames = bin_frames(stream, model.spikes_per_frame)
        out_lines.extend(_trace_lines(model, frames))
    _write_text(args.out, "\n".join(out_lines) + "\n")
    return 0


def cmd_eval(args) -> int:
    model = model_io.load_model(_read_text(args.model))
    cfg = load_config(args.config)
    entries = _read_manifest(args.manifest)
    samples = [
        (_load_stream(path, model.geometry), label) for path, label in entries
    ]
    pipe_cfg = PipelineConfig(
        geometry=model.geometry,
        spikes_per_frame=model.spikes_per_frame,
        fifo_capacity=cfg.fifo_capacity,
    )
    summary = run_batch(samples, pipe_cfg, model)
    if args.format == "csv":
        lines = ["true,predicted,count"]
        lines.extend(f"{t},{p},{n}" for t, p, n in summary.confusion_rows())
        lines.append(f"accuracy,,{summary.accuracy:.6f}")
        _write_text(args.out, "\n".join(lines) + "\n")
    else:
        lines = [
            f"samples: {summary.total}",
            f"correct: {summary.correct}",
            f"accuracy: {summary.accuracy:.4f}",
            "confusion (true, predicted, count):",
        ]
        lines.extend(f"  {t} -> {p}: {n}" for t, p, n in summary.confusion_rows())
        _write_text(args.out, "\n".join(lines) + "\n")
    return 0


# -- cost ---------------------------------------------------------------


def cmd_cost(args) -> int:
    target = args.target or args.target_flag
    if target is None:
        raise _UsageError("cost requires a target: sgf, convnet, or pat")
    if target == "convnet":
        reports = [costmodel.convnet_report()]
    elif target == "pat":
        reports = [costmodel.pat_report()]
    elif target == "sgf":
        reports = [costmodel.sgf_size_report(), costmodel.sgf_ops_report()]
    else:
        raise _UsageError(f"unknown cost target {target!r}")
    if args.format == "csv":
        text = "\n".join(r.to_csv() for r in reports)
    else:
        text = "\n".join(r.to_text() for r in reports)
    _write_text(args.out, text)
    return 0


# -- aer-dump -------------------------------------------------------------


def cmd_aer_dump(args) -> int:
    if args.decode:
        lines = []
        for lineno, raw in enumerate(_read_text(args.events).splitlines(), 1):
            token = raw.strip()
            if not token:
                continue
            try:
                word = int(token, 16)
            except ValueError:
                raise StreamFormatError(
                    f"{args.events}: not a hex word: {token!r}", line=lineno
                ) from None
            packet = aer.decode(word)
            lines.append(f"{packet.col},{packet.row},{packet.polarity}")
        _write_text(args.out, "\n".join(lines) + ("\n" if lines else ""))
        return 0
    geometry = _parse_geometry(args.geometry) if args.geometry else (128, 128)
    stream = _load_stream(args.events, geometry)
    lines = [
        f"0x{aer.encode(aer.AerPacket(int(x), int(y), 1 if p > 0 else 0)):04X}"
        for x, y, p in zip(stream.x, stream.y, stream.p)
    ]
    _write_text(args.out, "\n".join(lines) + ("\n" if lines else ""))
    return 0


# -- parser ---------------------------------------------------------------


def build_parser() -> _Parser:
    parser = _Parser(prog="sgf", description=__doc__)
    sub = parser.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--config", default=None, help="config file (INI)")
        p.add_argument("--out", default=None, help="output path (default stdout)")

    p_gen = sub.add_parser("gen", aliases=["generate"],
                           help="generate synthetic gesture event files")
    common(p_gen)
    p_gen.add_argument("--kind", choices=list(TRAJECTORY_KINDS))
    p_gen.add_argument("--seed", type=int, default=1)
    p_gen.add_argument("--frames", type=int, default=None,
                       help="frame count (default 64)")
    p_gen.add_argument("--blob-radius", type=int, default=None)
    p_gen.add_argument("--rate", type=int, default=None,
                       help="blob events per frame (default 900)")
    p_gen.add_argument("--noise", type=float, default=None,
                       help="noise density per pixel per frame (default 0)")
    p_gen.add_argument("--center", default=None, help="trajectory anchor 'x,y'")
    p_gen.add_argument("--amplitude", type=float, default=None)
    p_gen.add_argument("--cycles", type=float, default=None)
    p_gen.add_argument("--geometry", default=None, help="WxH, default 128x128")
    p_gen.add_argument("--suite", action="store_true",
                       help="emit the 10-class train/test suite")
    p_gen.add_argument("--out-dir", default=None)
    p_gen.add_argument("--train-per-class", type=int, default=15)
    p_gen.add_argument("--test-per-class", type=int, default=10)
    p_gen.set_defaults(func=cmd_gen)

    p_filter = sub.add_parser("filter", help="run the noise-cancellation core")
    common(p_filter)
    p_filter.add_argument("events")
    p_filter.add_argument("--params", default=None,
                          help="'delta_s,theta_s,delta_t,theta_t'")
    p_filter.add_argument("--strength", choices=["weak", "strong"],
                          default="weak")
    p_filter.add_argument("--format", choices=["records", "pgm"],
                          default="records")
    p_filter.add_argument("--geometry", default=None)
    p_filter.add_argument("--spikes-per-frame", type=int, default=None)
    p_filter.set_defaults(func=cmd_filter)

    p_train = sub.add_parser("train", help="single-pass training from a manifest")
    common(p_train)
    p_train.add_argument("--manifest", required=True)
    p_train.add_argument("--model-out", required=True)
    p_train.add_argument("--knowledge-out", default=None,
                         help="write per-trial distinct-vector CSV")
    p_train.add_argument("--vectors-out", default=None,
                         help="dump training feature vectors, one per line")
    p_train.add_argument("--similarity", choices=["nor", "xnor"], default=None)
    p_train.set_defaults(func=cmd_train)

    p_infer = sub.add_parser("infer", help="classify one event file")
    common(p_infer)
    p_infer.add_argument("events")
    p_infer.add_argument("--model", required=True)
    p_infer.add_argument("--trace", action="store_true",
                         help="dump per-frame traces and token sequences")
    p_infer.add_argument("--format", choices=["text", "csv"], default="text")
    p_infer.set_defaults(func=cmd_infer)

    p_eval = sub.add_parser("eval", aliases=["evaluate"],
                            help="accuracy/confusion over a manifest")
    common(p_eval)
    p_eval.add_argument("--manifest", required=True)
    p_eval.add_argument("--model", required=True)
    p_eval.add_argument("--format", choices=["text", "csv"], default="text")
    p_eval.set_defaults(func=cmd_eval)

    p_cost = sub.add_parser("cost", help="model-size and operation tables")
    common(p_cost)
    p_cost.add_argument("target", nargs="?",
                        choices=["sgf", "convnet", "pat"])
    p_cost.add_argument("--target", dest="target_flag", default=None,
                        choices=["sgf", "convnet", "pat"])
    p_cost.add_argument("--format", choices=["text", "csv"], default="text")
    p_cost.set_defaults(func=cmd_cost)

    p_dump = sub.add_parser("aer-dump", help="hex packet listing of an event file")
    common(p_dump)
    p_dump.add_argument("events")
    p_dump.add_argument("--decode", action="store_true",
                        help="input is a hex listing; emit col,row,polarity")
    p_dump.add_argument("--geometry", default=None)
    p_dump.set_defaults(func=cmd_aer_dump)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if not getattr(args, "command", None):
            parser.print_help()
            return 1
        return args.func(args)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return 1
    except SGFError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
