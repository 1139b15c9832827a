"""Time each hot kernel under the compiled and the pure-Python backend.

    python benchmarks/bench_backends.py [image.ppm] [--repeat N]

Prints a table of median milliseconds per kernel and the speedup of the
compiled backend. Both backends must produce identical output; the script
exits nonzero if they do not.
"""
import argparse
import pathlib
import statistics
import sys
import time

import numpy as np

from graphseg import _backend
from graphseg.agglomerate import SegParams
from graphseg.engine import run_sequential
from graphseg.forest import ComponentForest
from graphseg.imaging import gaussian_kernel, load_ppm

DEFAULT_IMAGE = pathlib.Path(__file__).resolve().parent.parent / "tests" / "data" / "coffee_512x288.ppm"


def _time(fn, repeat):
    samples, out = [], None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        samples.append((time.perf_counter() - t0) * 1e3)
    return statistics.median(samples), out


def kernel_cases(img, params):
    src = img.data.astype(np.float64)
    taps = gaussian_kernel(params.sigma)
    h, w = img.height, img.width

    def cases(kern):
        smoothed = kern.smooth_rows(src, taps, 0, h)
        edges = kern.rect_edges(smoothed, 0, 0, w, h, 0, 0, w, h)
        ordered = kern.sort_edges(edges)
        half = len(ordered) // 2
        left, right = kern.sort_edges(ordered[:half]), kern.sort_edges(ordered[half:])

        def agglomerate(which):
            def go():
                f = ComponentForest(w * h, params.k)
                kern.threshold_pass(f.parent, f.rank, f.size, f.threshold, ordered, params.k)
                if which == "minsize":
                    kern.minsize_pass(f.parent, f.rank, f.size, f.threshold, ordered, params.min_size)
                return f.parent.copy()
            return go

        return {
            "smooth_rows": lambda: kern.smooth_rows(src, taps, 0, h),
            "rect_edges": lambda: kern.rect_edges(smoothed, 0, 0, w, h, 0, 0, w, h),
            "sort_edges": lambda: kern.sort_edges(edges),
            "merge_sorted": lambda: kern.merge_sorted(left, right),
            "threshold_pass": agglomerate("threshold"),
            "threshold+minsize": agglomerate("minsize"),
        }

    return cases


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("image", nargs="?", default=str(DEFAULT_IMAGE))
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)

    if "core" not in _backend.available():
        print("compiled backend not built; nothing to compare", file=sys.stderr)
        return 1
    img = load_ppm(args.image)
    params = SegParams()
    build = kernel_cases(img, params)
    names = ("core", "pure")
    tables = {name: build(_backend.get(name)) for name in names}

    print(f"{img.width}x{img.height} {pathlib.Path(args.image).name}, median of {args.repeat} runs")
    print(f"{'kernel':<20}{'core ms':>10}{'pure ms':>12}{'speedup':>10}")
    mismatch = False
    for kernel in tables["core"]:
        (tc, oc), (tp, op) = (_time(tables[n][kernel], args.repeat) for n in names)
        same = np.array_equal(oc, op)
        mismatch |= not same
        print(f"{kernel:<20}{tc:>10.2f}{tp:>12.2f}{tp / tc:>9.1f}x{'' if same else '  MISMATCH'}")

    totals = {}
    for name in names:
        _backend.kernels = _backend.get(name)
        totals[name] = _time(lambda: run_sequential(img, params), args.repeat)
    _backend.kernels = _backend.get("core")
    (tc, rc), (tp, rp) = totals["core"], totals["pure"]
    print(f"{'full sequential run':<20}{tc:>10.2f}{tp:>12.2f}{tp / tc:>9.1f}x")
    mismatch |= not np.array_equal(rc.labels, rp.labels)
    return 1 if mismatch else 0


if __name__ == "__main__":
    sys.exit(main())
