"""Command-line entry point: ``graphseg segment | bench | compare``.

Exit codes: 0 success, 2 usage error, 3 I/O error, 4 configuration error
(tile count too large for the image).
"""
import argparse
import json
import os
import sys

from .agglomerate import STAGES, SegParams
from .bench import compare_partitions, render_svg, run_bench, write_csv
from .engine import STRATEGIES, StrategyConfig, run
from .errors import GridError, ParameterError, PPMError
from .imaging import load_ppm, save_ppm

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_IO = 3
EXIT_CONFIG = 4


def _int_list(text):
    try:
        values = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not values or any(v < 1 for v in values):
        raise argparse.ArgumentTypeError("tile counts must be integers >= 1")
    return values


def _strategy_list(text):
    values = [v.strip() for v in text.split(",") if v.strip()]
    bad = [v for v in values if v not in STRATEGIES]
    if not values or bad:
        raise argparse.ArgumentTypeError(f"strategies must be among {', '.join(STRATEGIES)}")
    return values


def _workers(text):
    if text == "auto":
        return None
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("workers must be >= 1 or 'auto'")
    return value


def _add_params(p):
    p.add_argument("--k", type=float, default=300.0, help="merge slack constant (default 300)")
    p.add_argument("--min-size", type=int, default=50, help="smallest kept component (default 50)")
    p.add_argument("--sigma", type=float, default=0.8, help="Gaussian pre-smoothing sigma (default 0.8)")
    p.add_argument("--workers", type=_workers, default=None, help="worker threads or 'auto' (default)")


def build_parser():
    parser = argparse.ArgumentParser(prog="graphseg", description="Graph-based image segmentation")
    sub = parser.add_subparsers(dest="command", required=True)

    seg = sub.add_parser("segment", help="segment one PPM image")
    seg.add_argument("--input", required=True)
    seg.add_argument("--output", required=True)
    _add_params(seg)
    seg.add_argument("--strategy", choices=STRATEGIES, default="sequential")
    seg.add_argument("--tiles", type=int, default=4, help="tile count for hybrid (default 4)")
    seg.add_argument("--seed", type=int, default=42, help="palette seed (default 42)")
    seg.add_argument("--stats", help="write component count and stage timings as JSON")
    seg.set_defaults(func=cmd_segment)

    bench = sub.add_parser("bench", help="time strategies over one or more images")
    bench.add_argument("--input", action="append", required=True, help="PPM image, repeatable")
    bench.add_argument("--strategies", type=_strategy_list, default=list(STRATEGIES))
    bench.add_argument("--tiles", type=_int_list, default=[1, 2, 4, 8])
    bench.add_argument("--runs", type=int, default=5)
    bench.add_argument("--warmup", type=int, default=1, help="untimed runs per configuration")
    bench.add_argument("--csv", required=True)
    bench.add_argument("--svg")
    _add_params(bench)
    bench.set_defaults(func=cmd_bench)

    cmp_ = sub.add_parser("compare", help="compare two rendered segmentations")
    cmp_.add_argument("--a", required=True)
    cmp_.add_argument("--b", required=True)
    cmp_.add_argument("--json", help="also write the comparison to this path")
    cmp_.set_defaults(func=cmd_compare)
    return parser


def _params(args):
    return SegParams(k=args.k, min_size=args.min_size, sigma=args.sigma)


def cmd_segment(args):
    params = _params(args)
    config = StrategyConfig(args.strategy, n=args.tiles, workers=args.workers, seed=args.seed)
    img = load_ppm(args.input)
    result = run(img, params, config)
    save_ppm(args.output, result.image)
    if args.stats:
        timings = {s: result.stage_timings[s] for s in STAGES}
        timings["total"] = result.stage_timings["total"]
        stats = {
            "component_count": result.component_count,
            "width": img.width,
            "height": img.height,
            "k": params.k,
            "min_size": params.min_size,
            "sigma": params.sigma,
            "timings_ms": timings,
        }
        with open(args.stats, "w") as fh:
            json.dump(stats, fh, indent=2)
    return EXIT_OK


def cmd_bench(args):
    if args.runs < 1:
        raise ParameterError("--runs must be >= 1")
    params = _params(args)
    images = [(os.path.basename(p), load_ppm(p)) for p in args.input]

    def progress(row):
        print(
            f"{row['image']} {row['strategy']} n={row['n']} w={row['workers']} "
            f"run {row['run']}: {row['total_ms']:.1f} ms",
            file=sys.stderr,
        )

    report = run_bench(images, args.strategies, args.tiles, args.runs, args.workers,
                       params, warmup=args.warmup, progress=progress)
    with open(args.csv, "w", newline="") as fh:
        write_csv(report, fh)
    if args.svg:
        with open(args.svg, "w") as fh:
            fh.write(render_svg(report))
    return EXIT_OK


def cmd_compare(args):
    a = load_ppm(args.a)
    b = load_ppm(args.b)
    try:
        comparison = compare_partitions(a, b)
    except ValueError as exc:
        print(f"graphseg: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text = json.dumps(comparison.as_dict())
    print(text)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write(text + "\n")
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GridError as exc:
        print(f"graphseg: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ParameterError as exc:
        print(f"graphseg: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OSError, PPMError) as exc:
        print(f"graphseg: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
