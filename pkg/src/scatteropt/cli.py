"""Command-line entry point: load datasets, run sweeps, reproduce the
timing/quality tables, render designs, and serve the HTTP API.

Every subcommand is a thin shell over the library. Exit codes: 0 ok,
2 usage, 3 data error, 4 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .dataset import DatasetError, PointSet, Registry, load_csv
from .optimizer import (
    DEFAULT_SEED,
    SweepRanges,
    quality_rank,
    quality_table_csv,
    ranked_to_json,
    scaling_curve,
    scaling_table_csv,
    sweep,
)
from .raster import AREA_GRID, OPACITY_GRID, RenderParams, render, to_png_bytes
from .sampling import SamplerKind, SampleSpec, sample, time_samplers, timing_table_csv
from .synth import gaussian_mixture

USAGE_EXIT, DATA_EXIT, RUNTIME_EXIT = 2, 3, 4


def parse_range_step(text: str) -> list[float]:
    """min:max:step -> inclusive list of values."""
    lo, hi, step = (float(v) for v in text.split(":"))
    if step <= 0 or lo > hi:
        raise ValueError(f"bad range {text!r}")
    out = []
    i = 0
    while (v := round(lo + i * step, 10)) <= hi + 1e-12:
        out.append(v)
        i += 1
    return out


def parse_float_list(text: str) -> list[float]:
    return [float(v) for v in text.split(",")]


def parse_int_pair(text: str) -> tuple[int, int]:
    lo, hi = (int(v) for v in text.split(":"))
    return lo, hi


def parse_samplers(text: str) -> list[SamplerKind]:
    if text == "all":
        return list(SamplerKind)
    return [SamplerKind(v.strip()) for v in text.split(",")]


def _load_points(args) -> PointSet:
    if getattr(args, "synthetic", None):
        return gaussian_mixture(args.synthetic, seed=args.seed)
    if getattr(args, "dataset", None):
        return Registry(args.data_dir).get(args.dataset)
    if getattr(args, "data", None):
        return load_csv(args.data, args.x_col, args.y_col)
    raise DatasetError("no input: pass --data, --dataset, or --synthetic")


def cmd_load(args) -> int:
    ps = load_csv(args.data, args.x_col, args.y_col, name=args.name)
    ds_id = Registry(args.data_dir).register(ps)
    print(f"{ds_id}  {ps.name}  n={len(ps)} dropped={ps.dropped_rows}")
    return 0


def cmd_optimize(args) -> int:
    ps = _load_points(args)
    ranked = sweep(
        ps,
        SweepRanges(clusters=parse_int_pair(args.clusters) if args.clusters else None),
        samplers=parse_samplers(args.samplers),
        top_k=args.top,
        seed=args.seed,
        workers=args.jobs,
        rate_grid=parse_range_step(args.sr),
        area_grid=parse_float_list(args.ps),
        opacity_grid=parse_float_list(args.op),
    )
    if args.out:
        Path(args.out).write_text(json.dumps(ranked_to_json(ranked), indent=1))
    print(f"{'rank':<5}{'sampler':<26}{'rate':>6}{'area':>6}{'opacity':>9}{'clusters':>9}{'saliency':>10}")
    for i, d in enumerate(ranked, 1):
        p = d.params
        print(
            f"{i:<5}{p.sampler.value:<26}{p.rate:>6.2f}{p.point_area:>6.0f}"
            f"{p.opacity:>9.2f}{d.score.count:>9}{d.score.value:>10.6f}"
        )
    return 0


def cmd_render(args) -> int:
    ps = _load_points(args)
    spec = SampleSpec(kind=SamplerKind(args.sampler), rate=args.rate, seed=args.seed)
    sampled = sample(ps, spec)
    buf = render(ps.points[sampled.indices], RenderParams(args.area, args.opacity))
    Path(args.out).write_bytes(to_png_bytes(buf))
    print(f"wrote {args.out}")
    return 0


def cmd_bench_sampling(args) -> int:
    ps = _load_points(args)
    rows = time_samplers(
        ps,
        rates=parse_range_step(args.rates),
        kinds=parse_samplers(args.samplers),
        repeats=args.repeats,
        seed=args.seed,
    )
    csv_text = timing_table_csv(rows)
    Path(args.out).write_text(csv_text)
    print(csv_text, end="")
    return 0


def cmd_bench_scaling(args) -> int:
    sizes = [int(float(v)) for v in args.sizes.split(",")]
    rows = scaling_curve(sizes, repeats=args.repeats, seed=args.seed)
    csv_text = scaling_table_csv(rows)
    Path(args.out).write_text(csv_text)
    print(csv_text, end="")
    return 0


def cmd_quality(args) -> int:
    ps = _load_points(args)
    rows = quality_rank(
        ps,
        rates=parse_range_step(args.rates),
        samplers=parse_samplers(args.samplers),
        repeats=args.repeats,
        seed=args.seed,
    )
    csv_text = quality_table_csv(rows)
    Path(args.out).write_text(csv_text)
    print(csv_text, end="")
    return 0


def cmd_serve(args) -> int:
    import uvicorn

    from .service import JobRunner, JobStore, create_app

    registry = Registry(args.data_dir)
    store = JobStore(registry.root)
    runner = JobRunner(store, registry, workers=args.jobs, sweep_workers=args.sweep_jobs)
    static = Path(args.static_dir) if args.static_dir else Path(__file__).resolve().parents[2] / "frontend" / "dist"
    app = create_app(registry, store, runner, static_dir=static if static.is_dir() else None)
    uvicorn.run(app, host=args.bind, port=args.port, log_level="info")
    return 0


def _add_input_flags(p: argparse.ArgumentParser, synthetic_default: int | None = None):
    p.add_argument("--data", help="CSV file to load")
    p.add_argument("--x-col", default="x")
    p.add_argument("--y-col", default="y")
    p.add_argument("--dataset", help="registered dataset id")
    p.add_argument("--data-dir", default=None, help="registry directory (default $SCATTEROPT_DATA_DIR or ./data)")
    p.add_argument("--synthetic", type=int, default=synthetic_default, help="use an n-point synthetic mixture")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scatteropt", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("load", help="register a CSV dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--x-col", required=True)
    p.add_argument("--y-col", required=True)
    p.add_argument("--name", default=None)
    p.add_argument("--data-dir", default=None)
    p.set_defaults(func=cmd_load)

    p = sub.add_parser("optimize", help="sweep the design space and rank by saliency")
    _add_input_flags(p)
    p.add_argument("--sr", default="0.05:0.95:0.05", help="sampling-rate range min:max:step")
    p.add_argument("--ps", default=",".join(str(v) for v in AREA_GRID), help="point areas, comma separated")
    p.add_argument("--op", default=",".join(str(v) for v in OPACITY_GRID), help="opacities, comma separated")
    p.add_argument("--samplers", default="all")
    p.add_argument("--clusters", default=None, help="restrict cluster count, min:max")
    p.add_argument("--top", type=int, default=3)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--jobs", type=int, default=1, help="parallel workers")
    p.add_argument("--out", default=None, help="write ranked results JSON here")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("render", help="rasterize one design to PNG")
    _add_input_flags(p)
    p.add_argument("--sampler", default="random")
    p.add_argument("--rate", type=float, default=0.5)
    p.add_argument("--area", type=float, default=40.0)
    p.add_argument("--opacity", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("bench-sampling", help="subsampling wall-time table (CSV)")
    _add_input_flags(p, synthetic_default=None)
    p.add_argument("--rates", default="0.05:0.95:0.05")
    p.add_argument("--samplers", default="all")
    p.add_argument("--repeats", type=int, default=3)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench_sampling)

    p = sub.add_parser("bench-scaling", help="render+topology wall time vs data size (CSV)")
    p.add_argument("--sizes", default="1e4,1e5,1e6", help="comma-separated point counts")
    p.add_argument("--repeats", type=int, default=2)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_bench_scaling)

    p = sub.add_parser("quality", help="per-sampler win-fraction table (CSV)")
    _add_input_flags(p)
    p.add_argument("--rates", default="0.05:0.3:0.05")
    p.add_argument("--samplers", default="all")
    p.add_argument("--repeats", type=int, default=1)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_quality)

    p = sub.add_parser("serve", help="run the HTTP API (and web UI, when built)")
    p.add_argument("--bind", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8787)
    p.add_argument("--data-dir", default=None)
    p.add_argument("--jobs", type=int, default=2, help="concurrent sweep jobs")
    p.add_argument("--sweep-jobs", type=int, default=1, help="workers inside each sweep")
    p.add_argument("--static-dir", default=None, help="built web UI bundle to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (DatasetError, KeyError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return DATA_EXIT
    except ValueError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except Exception as exc:  # pragma: no cover - defensive
        print(f"runtime error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
