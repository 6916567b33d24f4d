"""Command-line harness: generate, simulate, analyze, compare.

Every command is a pure function of (inputs, flags, seed): identical
invocations produce byte-identical outputs regardless of worker count, and
a JSON manifest with input/output checksums is written beside every
artifact. The consolidated delay-record table written by ``simulate`` is
the interchange format consumed by ``analyze``.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import multiprocessing
import os
import sys
from pathlib import Path

from . import __version__, manifest, metrics, mobility, spreading
from .graph import TemporalContactGraph, parse_contact_stream
from .spreading import FastestRouteTree, Message, PropagationMode, TreeEntry

METRICS = {
    "delay-injection": "delay_injection_s",
    "delay-first-send": "delay_first_send_s",
    "delay-first-contact": "delay_first_contact_s",
    "elapsed-contact": "elapsed_contact_frames",
}

DELAY_COLUMNS = [
    "root",
    "injection_frame",
    "mode",
    "node",
    "parent",
    "arrival_frame",
    "level",
    "delay_injection_s",
    "delay_first_send_s",
    "delay_first_contact_s",
    "elapsed_contact_frames",
]

TREE_COLUMNS = ["root", "injection_frame", "mode", "first_send_frame", "reached"]


class CommandError(Exception):
    pass


# -- shared helpers ----------------------------------------------------------


def _mode_from_flag(value: str) -> list[PropagationMode]:
    if value == "both":
        return [PropagationMode.ONE_HOP_PER_FRAME, PropagationMode.INTRA_FRAME]
    return [PropagationMode(value)]


def _mode_slug(mode: PropagationMode) -> str:
    return mode.value.replace("-", "_")


def _load_trace(path: str, delta_t: int) -> TemporalContactGraph:
    p = Path(path)
    if not p.is_file():
        raise CommandError(f"trace file not found: {path}")
    with open(p, "r", encoding="utf-8") as fp:
        g = parse_contact_stream(fp, delta_t, on_self_loop="skip")
    return g


def _resolve_workers(requested: int) -> int:
    if requested < 0:
        raise CommandError("--workers must be >= 0")
    return requested or os.cpu_count() or 1


def _write_rows(path: Path, header: list[str], rows, meta: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fp:
        if meta is not None:
            fp.write("# " + json.dumps(meta, sort_keys=True) + "\n")
        writer = csv.writer(fp, lineterminator="\n")
        writer.writerow(header)
        writer.writerows(rows)


def read_delay_table(path: str | Path) -> tuple[dict, list[dict]]:
    """Read a consolidated delay-record table: (metadata, typed rows)."""
    p = Path(path)
    if not p.is_file():
        raise CommandError(f"delay table not found: {path}")
    meta: dict = {}
    rows: list[dict] = []
    with open(p, "r", encoding="utf-8", newline="") as fp:
        first = fp.readline()
        if first.startswith("#"):
            meta = json.loads(first[1:].strip())
        else:
            fp.seek(0)
        reader = csv.DictReader(fp)
        int_fields = set(DELAY_COLUMNS) - {"root", "mode", "node", "parent"}
        for raw in reader:
            row = dict(raw)
            for k in int_fields:
                row[k] = int(row[k])
            rows.append(row)
    return meta, rows


# -- generate ----------------------------------------------------------------


def _generate_config(args) -> mobility.MobilityConfig:
    data: dict = {}
    if args.config:
        cfg_path = Path(args.config)
        if not cfg_path.is_file():
            raise CommandError(f"config file not found: {args.config}")
        with open(cfg_path, "r", encoding="utf-8") as fp:
            data = json.load(fp)
    overrides = {
        "model": args.model,
        "node_count": args.nodes,
        "detection_range": args.range,
        "sample_interval": args.sample_interval,
        "duration": args.duration,
        "rng_seed": args.seed,
        "warmup_s": args.warmup,
    }
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    if args.area is not None:
        data["area"] = args.area
    if "model" not in data:
        raise CommandError("no mobility model given (use --model or a config file)")
    try:
        return mobility.MobilityConfig.from_dict(data)
    except (TypeError, ValueError) as exc:
        raise CommandError(f"bad mobility config: {exc}") from exc


def cmd_generate(args) -> int:
    cfg = _generate_config(args)
    out = Path(args.out)
    outputs: list[Path] = []
    try:
        g = mobility.generate_contact_graph(cfg)
        out.parent.mkdir(parents=True, exist_ok=True)
        with open(out, "w", encoding="utf-8") as fp:
            g.serialize(fp)
        outputs.append(out)
        man = manifest.build_manifest(
            "generate",
            {"out": str(out)},
            inputs={},
            outputs={"trace": out},
            config=cfg.to_dict(),
            seed=cfg.rng_seed,
            delta_t=int(cfg.sample_interval),
            trace_stats=g.describe(),
        )
        man_path = out.with_suffix(out.suffix + ".manifest.json")
        manifest.write_manifest(man_path, man)
        outputs.append(man_path)
    except Exception:
        for p in outputs:
            p.unlink(missing_ok=True)
        raise
    stats = g.describe()
    print(
        f"wrote {out} ({stats['nodes']} nodes, {stats['contacts']} contacts, "
        f"{stats['frames_active']} active frames)"
    )
    return 0


# -- simulate ----------------------------------------------------------------

_SIM_STATE: dict = {}


def _sim_task(task: tuple[int, int]):
    root, t0 = task
    g = _SIM_STATE["graph"]
    mode = _SIM_STATE["mode"]
    tree = spreading.flood(g, Message(root, t0), mode)
    rows = []
    for rec in metrics.delay_records(g, tree, _SIM_STATE["inclusive"]):
        rows.append(
            (
                g.label_of(rec.root),
                rec.injection_frame,
                mode.value,
                g.label_of(rec.node),
                g.label_of(rec.parent),
                rec.arrival_frame,
                rec.level,
                rec.delay_injection_s,
                rec.delay_first_send_s,
                rec.delay_first_contact_s,
                rec.elapsed_contact_frames,
            )
        )
    tree_row = (
        g.label_of(root),
        t0,
        mode.value,
        "" if tree.first_send_frame is None else tree.first_send_frame,
        len(tree),
    )
    export = None
    if _SIM_STATE["export"]:
        export = sorted(
            (n, e.parent, e.arrival, e.level) for n, e in tree.entries.items()
        )
        export = (tree.first_send_frame, export)
    return rows, tree_row, export


def _parse_injection_frames(args, g: TemporalContactGraph, delta_t: int) -> list[int]:
    frames: list[int] = []
    if args.times_seconds:
        for part in args.times_seconds.split(","):
            part = part.strip()
            if part:
                frames.append(math.ceil(float(part) / delta_t))
    if args.times is not None:
        if "," in args.times:
            for part in args.times.split(","):
                part = part.strip()
                if part:
                    frames.append(int(part))
        else:
            try:
                count = int(args.times)
            except ValueError:
                raise CommandError(f"--times expects a count or a comma list, got {args.times!r}")
            frames.extend(spreading.evenly_spaced_injection_frames(g, count))
    if not frames:
        frames = spreading.evenly_spaced_injection_frames(g, 50)
    bad = [f for f in frames if f < 0]
    if bad:
        raise CommandError(f"negative injection frames: {bad}")
    return sorted(set(frames))


def _parse_roots(args, g: TemporalContactGraph) -> list[int]:
    if args.roots == "all":
        return list(range(g.node_count))
    roots = []
    for part in args.roots.split(","):
        part = part.strip()
        if part:
            roots.append(g.id_of(part))
    if not roots:
        raise CommandError("no roots given")
    return roots


def _safe_name(label: str) -> str:
    return "".join(c if c.isalnum() or c in "-_." else f"x{ord(c):02x}" for c in label)


def cmd_simulate(args) -> int:
    g = _load_trace(args.trace, args.delta_t)
    stats = g.describe()
    print(
        f"loaded {args.trace}: {stats['nodes']} nodes, {stats['contacts']} contacts, "
        f"{stats['frames_active']} active frames, span {stats['frames_span']}"
    )
    if g.active_frame_count == 0:
        raise CommandError("trace has no contacts; nothing to simulate")
    frames = _parse_injection_frames(args, g, args.delta_t)
    roots = _parse_roots(args, g)
    workers = _resolve_workers(args.workers)
    inclusive = not args.first_contact_exclusive
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    trace_path = Path(args.trace)
    seed = None
    trace_man = trace_path.with_suffix(trace_path.suffix + ".manifest.json")
    if trace_man.is_file():
        try:
            seed = json.loads(trace_man.read_text())["seed"]
        except (KeyError, ValueError):
            seed = None

    outputs: list[Path] = []
    written: dict[str, Path] = {}
    try:
        for mode in _mode_from_flag(args.mode):
            spec = spreading.SweepSpec(tuple(frames), tuple(roots), mode)
            tasks = spec.tasks(g)
            _SIM_STATE.update(
                {"graph": g, "mode": mode, "inclusive": inclusive, "export": args.export_trees}
            )
            if workers > 1 and len(tasks) > 1:
                ctx = multiprocessing.get_context("fork")
                chunk = max(1, len(tasks) // (workers * 4))
                with ctx.Pool(workers) as pool:
                    results = list(pool.imap(_sim_task, tasks, chunksize=chunk))
            else:
                results = [_sim_task(t) for t in tasks]

            slug = _mode_slug(mode)
            meta = {
                "dataset": trace_path.stem,
                "trace": str(trace_path),
                "delta_t": args.delta_t,
                "mode": mode.value,
                "seed": seed,
                "injection_frames": frames,
                "roots": args.roots,
                "first_contact_inclusive": inclusive,
                "tool": f"frtsim {__version__}",
            }
            delay_path = out_dir / f"delays_{slug}.csv"
            _write_rows(
                delay_path, DELAY_COLUMNS, (r for res in results for r in res[0]), meta
            )
            outputs.append(delay_path)
            written[f"delays_{slug}"] = delay_path

            trees_path = out_dir / f"trees_{slug}.csv"
            _write_rows(trees_path, TREE_COLUMNS, (res[1] for res in results), meta)
            outputs.append(trees_path)
            written[f"trees_{slug}"] = trees_path

            if args.export_trees:
                frt_dir = out_dir / "frt" / slug
                frt_dir.mkdir(parents=True, exist_ok=True)
                for (root, t0), (_, _, export) in zip(tasks, results):
                    first_send, entries = export
                    tree = FastestRouteTree(
                        root,
                        t0,
                        mode,
                        first_send,
                        {n: TreeEntry(p, a, l) for n, p, a, l in entries},
                    )
                    path = frt_dir / f"frt_{_safe_name(g.label_of(root))}_t{t0}.csv"
                    with open(path, "w", encoding="utf-8") as fp:
                        spreading.write_tree_csv(tree, g, fp)
                    outputs.append(path)
                    written[f"frt_{slug}_{g.label_of(root)}_{t0}"] = path

        man = manifest.build_manifest(
            "simulate",
            {
                "trace": str(trace_path),
                "roots": args.roots,
                "times": args.times,
                "times_seconds": args.times_seconds,
                "mode": args.mode,
                "delta_t": args.delta_t,
                "first_contact_exclusive": args.first_contact_exclusive,
                "export_trees": args.export_trees,
                "out": str(out_dir),
            },
            inputs={"trace": trace_path},
            outputs=written,
            seed=seed,
            sweep={"injection_frames": frames, "roots": args.roots},
            trace_stats=stats,
        )
        man_path = out_dir / "simulate.manifest.json"
        manifest.write_manifest(man_path, man)
        outputs.append(man_path)
    except Exception:
        for p in outputs:
            p.unlink(missing_ok=True)
        raise
    print(f"wrote {len(written)} files to {out_dir} ({len(frames)} injection times, {len(roots)} roots)")
    return 0


# -- analyze -----------------------------------------------------------------


def _trees_from_rows(rows: list[dict]) -> list[FastestRouteTree]:
    grouped: dict[tuple, dict] = {}
    for row in rows:
        key = (row["root"], row["injection_frame"], row["mode"])
        grouped.setdefault(key, {})[row["node"]] = TreeEntry(
            row["parent"], row["arrival_frame"], row["level"]
        )
    trees = []
    for (root, t0, mode), entries in grouped.items():
        first = min(e.arrival for e in entries.values())
        trees.append(FastestRouteTree(root, t0, PropagationMode(mode), first, entries))
    return trees


def _histogram_rows(hist: metrics.Histogram):
    return [(f"{l!r}", f"{r!r}", f"{d!r}") for l, r, d in hist.bins]


def cmd_analyze(args) -> int:
    meta, rows = read_delay_table(args.table)
    if not rows:
        raise CommandError("delay table has no records")
    delta_t = int(meta.get("delta_t", args.delta_t))
    metric_names = list(METRICS) if args.metric == "all" else [args.metric]
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    outputs: list[Path] = []
    written: dict[str, Path] = {}
    summaries: dict[str, dict] = {}
    try:
        for name in metric_names:
            column = METRICS[name]
            samples = [row[column] for row in rows]
            hist = metrics.log_binned_pdf(samples, args.log_factor)
            hist_path = out_dir / f"hist_{column}.csv"
            _write_rows(hist_path, ["bin_left", "bin_right", "density"], _histogram_rows(hist))
            outputs.append(hist_path)
            written[f"hist_{column}"] = hist_path
            if len(samples) >= 2:
                s = metrics.summary(samples)
                summaries[column] = {
                    "average": s.average,
                    "standard_deviation": s.standard_deviation,
                    "dispersion_ratio": s.dispersion_ratio,
                    "count": s.count,
                }

        trees = _trees_from_rows(rows)

        degree_hist = metrics.avg_out_degree_density(trees, args.bin_width)
        degree_path = out_dir / "outdegree_density.csv"
        _write_rows(degree_path, ["bin_left", "bin_right", "density"], _histogram_rows(degree_hist))
        outputs.append(degree_path)
        written["outdegree_density"] = degree_path

        box_path = out_dir / "level_boxplot.csv"
        box_rows = [
            (b.level, b.count, f"{b.whisker_low!r}", f"{b.q25!r}", f"{b.median!r}",
             f"{b.q75!r}", f"{b.whisker_high!r}", len(b.outliers))
            for b in metrics.level_boxplot(trees)
        ]
        _write_rows(
            box_path,
            ["level", "count", "p10", "q25", "median", "q75", "p90", "n_outliers"],
            box_rows,
        )
        outputs.append(box_path)
        written["level_boxplot"] = box_path

        trace_graph = None
        if args.trace:
            trace_graph = _load_trace(args.trace, delta_t)

        if args.arrival_level is not None:
            n_frames = (
                trace_graph.n_frames
                if trace_graph is not None
                else max(row["arrival_frame"] for row in rows) + 1
            )
            series = metrics.arrival_probability_series(
                trees, args.arrival_level, args.arrival_window, delta_t, n_frames
            )
            series_path = out_dir / f"arrival_level{args.arrival_level}.csv"
            _write_rows(
                series_path,
                ["t_s", "probability"],
                [(f"{t!r}", f"{p!r}") for t, p in zip(series.times, series.probability)],
            )
            outputs.append(series_path)
            written[f"arrival_level{args.arrival_level}"] = series_path
            if trace_graph is not None:
                contacts = metrics.contact_probability_series(trace_graph, args.arrival_window)
                contacts_path = out_dir / "contact_series.csv"
                _write_rows(
                    contacts_path,
                    ["t_s", "probability"],
                    [(f"{t!r}", f"{p!r}") for t, p in zip(contacts.times, contacts.probability)],
                )
                outputs.append(contacts_path)
                written["contact_series"] = contacts_path

        summary_doc = {
            "dataset": meta.get("dataset", Path(args.table).stem),
            "table": str(args.table),
            "delta_t": delta_t,
            "mode": meta.get("mode"),
            "seed": meta.get("seed"),
            "sweep": {
                "injection_frames": meta.get("injection_frames"),
                "roots": meta.get("roots"),
            },
            "record_count": len(rows),
            "tree_count": len(trees),
            "metrics": summaries,
            "outputs": {name: str(p) for name, p in written.items()},
        }
        summary_path = out_dir / "summary.json"
        with open(summary_path, "w", encoding="utf-8") as fp:
            json.dump(summary_doc, fp, indent=2, sort_keys=True)
            fp.write("\n")
        outputs.append(summary_path)
        written["summary"] = summary_path

        man = manifest.build_manifest(
            "analyze",
            {
                "table": str(args.table),
                "metric": args.metric,
                "log_factor": args.log_factor,
                "bin_width": args.bin_width,
                "arrival_level": args.arrival_level,
                "arrival_window": args.arrival_window,
                "trace": args.trace,
                "out": str(out_dir),
            },
            inputs={"table": Path(args.table)},
            outputs=written,
            seed=meta.get("seed"),
            mode=meta.get("mode"),
            delta_t=delta_t,
        )
        man_path = out_dir / "analyze.manifest.json"
        manifest.write_manifest(man_path, man)
        outputs.append(man_path)
    except Exception:
        for p in outputs:
            p.unlink(missing_ok=True)
        raise
    print(f"wrote {len(written)} files to {out_dir}")
    return 0


# -- compare -----------------------------------------------------------------


def cmd_compare(args) -> int:
    if len(args.summaries) < 2:
        raise CommandError("need at least two summary files")
    column = METRICS[args.metric]
    table = []
    for path in args.summaries:
        p = Path(path)
        if not p.is_file():
            raise CommandError(f"summary file not found: {path}")
        doc = json.loads(p.read_text(encoding="utf-8"))
        try:
            stats = doc["metrics"][column]
            table.append(
                (
                    doc["dataset"],
                    stats["average"],
                    stats["standard_deviation"],
                    stats["dispersion_ratio"],
                )
            )
        except KeyError as exc:
            raise CommandError(f"summary {path} lacks metric {column!r} ({exc})") from exc

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: list[Path] = []
    try:
        csv_path = out_dir / "compare.csv"
        _write_rows(
            csv_path,
            ["dataset", "average", "standard_deviation", "dispersion_ratio"],
            [(d, f"{a!r}", f"{s!r}", f"{r!r}") for d, a, s, r in table],
            meta={"metric": column},
        )
        outputs.append(csv_path)

        widths = [max(len(str(row[0])) for row in table + [("dataset",)]), 14, 18, 12]
        lines = [
            f"{'dataset':<{widths[0]}}  {'average':>14}  {'std deviation':>18}  {'std/avg':>12}"
        ]
        for d, a, s, r in table:
            lines.append(f"{d:<{widths[0]}}  {a:>14.4f}  {s:>18.4f}  {r:>12.4f}")
        text = "\n".join(lines) + "\n"
        txt_path = out_dir / "compare.txt"
        txt_path.write_text(text, encoding="utf-8")
        outputs.append(txt_path)

        man = manifest.build_manifest(
            "compare",
            {"summaries": list(args.summaries), "metric": args.metric, "out": str(out_dir)},
            inputs={f"summary_{i}": Path(p) for i, p in enumerate(args.summaries)},
            outputs={"compare_csv": csv_path, "compare_txt": txt_path},
        )
        man_path = out_dir / "compare.manifest.json"
        manifest.write_manifest(man_path, man)
        outputs.append(man_path)
    except Exception:
        for p in outputs:
            p.unlink(missing_ok=True)
        raise
    print(text, end="")
    return 0


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="frtsim",
        description="Message flooding over temporal proximity networks: "
        "trace generation, sweeps, and delivery-delay analytics.",
    )
    parser.add_argument("--version", action="version", version=f"frtsim {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="generate a synthetic mobility trace")
    gen.add_argument("--config", help="JSON mobility config file")
    gen.add_argument("--model", choices=["rwp", "tlw"], help="mobility model")
    gen.add_argument("--nodes", type=int, help="number of nodes")
    gen.add_argument("--area", type=float, nargs=2, metavar=("W", "H"), help="area size in meters")
    gen.add_argument("--range", type=float, help="contact detection range in meters")
    gen.add_argument("--sample-interval", type=float, help="proximity sampling interval in seconds")
    gen.add_argument("--duration", type=float, help="simulated duration in seconds")
    gen.add_argument("--seed", type=int, help="RNG seed")
    gen.add_argument("--warmup", type=float, help="warm-up seconds discarded before recording")
    gen.add_argument("--out", required=True, help="output trace path")
    gen.set_defaults(func=cmd_generate)

    sim = sub.add_parser("simulate", help="flood sweeps over a contact trace")
    sim.add_argument("trace", help="contact trace file ('t i j' lines)")
    sim.add_argument("--out", required=True, help="output directory")
    sim.add_argument("--roots", default="all", help="'all' or comma-separated node labels")
    sim.add_argument(
        "--times",
        default=None,
        help="injection times: a count N (evenly spaced frames) or a comma list of frames; default 50",
    )
    sim.add_argument("--times-seconds", default=None, help="comma list of injection times in seconds")
    sim.add_argument(
        "--mode",
        choices=["one-hop", "intra-frame", "both"],
        default="one-hop",
        help="propagation mode (default one-hop)",
    )
    sim.add_argument("--delta-t", type=int, default=20, help="frame width in seconds (default 20)")
    sim.add_argument("--workers", type=int, default=0, help="parallel workers; 0 = all cores")
    sim.add_argument(
        "--first-contact-exclusive",
        action="store_true",
        help="measure a node's first contact strictly after the root's first send",
    )
    sim.add_argument("--export-trees", action="store_true", help="write one CSV per tree")
    sim.set_defaults(func=cmd_simulate)

    ana = sub.add_parser("analyze", help="distributions and summary stats from a delay table")
    ana.add_argument("table", help="delay-record table from 'simulate'")
    ana.add_argument("--out", required=True, help="output directory")
    ana.add_argument(
        "--metric",
        choices=["all", *METRICS],
        default="all",
        help=f"delay metric (one of: {', '.join(METRICS)}; default all)",
    )
    ana.add_argument("--log-factor", type=float, default=1.25, help="log-bin growth factor")
    ana.add_argument("--bin-width", type=float, default=0.25, help="out-degree density bin width")
    ana.add_argument("--arrival-level", type=int, default=None, help="tree level for the arrival series")
    ana.add_argument(
        "--arrival-window", type=int, default=1800, help="half window in seconds (default 1800)"
    )
    ana.add_argument("--trace", default=None, help="original trace (adds the all-contacts series)")
    ana.add_argument("--delta-t", type=int, default=20, help="frame width if table lacks metadata")
    ana.set_defaults(func=cmd_analyze)

    cmp_ = sub.add_parser("compare", help="consolidate summary JSONs into one table")
    cmp_.add_argument("summaries", nargs="+", help="summary.json files from 'analyze'")
    cmp_.add_argument("--out", required=True, help="output directory")
    cmp_.add_argument(
        "--metric", choices=list(METRICS), default="elapsed-contact", help="metric to tabulate"
    )
    cmp_.set_defaults(func=cmd_compare)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except CommandError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # input/data errors surface with a clean message
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
