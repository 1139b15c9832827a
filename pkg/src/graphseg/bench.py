"""Benchmark harness, CSV/SVG reporting and partition comparison."""
import csv
import statistics
from dataclasses import dataclass, field
from html import escape

import numpy as np

from .agglomerate import STAGES, SegParams
from .engine import StrategyConfig, default_workers, run

CSV_COLUMNS = [
    "image", "width", "height", "strategy", "n", "workers", "run",
    "smooth_ms", "build_ms", "sort_ms", "threshold_ms", "minsize_ms", "render_ms", "total_ms",
]
TIME_COLUMNS = [f"{s}_ms" for s in STAGES] + ["total_ms"]
MEDIAN = "median"


@dataclass
class BenchReport:
    rows: list = field(default_factory=list)

    def configurations(self):
        seen = {}
        for row in self.rows:
            seen.setdefault(_config_key(row), []).append(row)
        return seen

    def medians(self):
        out = []
        for key, rows in self.configurations().items():
            med = dict(rows[0])
            med["run"] = MEDIAN
            for col in TIME_COLUMNS:
                med[col] = statistics.median(r[col] for r in rows)
            out.append(med)
        return out


def _config_key(row):
    return (row["image"], row["strategy"], int(row["n"]), int(row["workers"]))


def configurations(strategies, tiles, workers):
    """Expand strategy and tile lists into ``(strategy, n, workers)`` triples.

    ``n`` is 1 for the untiled strategies; sequential always reports one worker.
    """
    out = []
    for strategy in strategies:
        if strategy == "hybrid":
            out.extend(("hybrid", n, min(workers, n)) for n in tiles)
        elif strategy == "pipelined":
            out.append(("pipelined", 1, workers))
        else:
            out.append((strategy, 1, 1))
    return out


def run_bench(images, strategies=("sequential", "pipelined", "hybrid"), tiles=(1, 2, 4, 8),
              runs=5, workers=None, params=None, warmup=1, progress=None):
    """Time every configuration ``runs`` times per image, one configuration at a time.

    ``images`` is a list of ``(name, RasterImage)``. ``warmup`` untimed runs
    precede each configuration's recorded runs.
    """
    params = params or SegParams()
    workers = workers or default_workers()
    report = BenchReport()
    for name, img in images:
        for strategy, n, w in configurations(strategies, tiles, workers):
            config = StrategyConfig(strategy, n=n, workers=w)
            for _ in range(warmup):
                run(img, params, config)
            for i in range(runs):
                result = run(img, params, config)
                row = {
                    "image": name, "width": img.width, "height": img.height,
                    "strategy": strategy, "n": n, "workers": w, "run": i,
                }
                # rounded at capture so medians recomputed from the CSV match exactly
                for stage in STAGES:
                    row[f"{stage}_ms"] = round(result.stage_timings[stage], 3)
                row["total_ms"] = round(result.stage_timings["total"], 3)
                report.rows.append(row)
                if progress:
                    progress(row)
    return report


def _fmt(value):
    return repr(round(value, 4)) if isinstance(value, float) else str(value)


def write_csv(report, fh):
    writer = csv.writer(fh, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for row in report.rows + report.medians():
        writer.writerow([_fmt(row[c]) for c in CSV_COLUMNS])


def read_csv(fh):
    """Parse a bench CSV back into ``(run_rows, median_rows)``."""
    reader = csv.DictReader(fh)
    if reader.fieldnames != CSV_COLUMNS:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    runs, medians = [], []
    for rec in reader:
        row = dict(rec)
        for col in ("width", "height", "n", "workers"):
            row[col] = int(row[col])
        for col in TIME_COLUMNS:
            row[col] = float(row[col])
        if row["run"] == MEDIAN:
            medians.append(row)
        else:
            row["run"] = int(row["run"])
            runs.append(row)
    return runs, medians


def render_svg(report, title="Median total wall-clock per configuration"):
    """Horizontal bar chart of median totals as a standalone SVG 1.1 document."""
    meds = report.medians()
    bar_h, gap, left, right, top = 18, 6, 260, 90, 40
    width = 760
    height = top + len(meds) * (bar_h + gap) + 20
    peak = max((m["total_ms"] for m in meds), default=1.0) or 1.0
    span = width - left - right
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{width}" height="{height}" '
        f'viewBox="0 0 {width} {height}" font-family="sans-serif" font-size="12">',
        f'<text x="{width / 2}" y="22" text-anchor="middle" font-size="14">{escape(title)}</text>',
    ]
    palette = {"sequential": "#4c72b0", "pipelined": "#55a868", "hybrid": "#c44e52"}
    for i, m in enumerate(meds):
        y = top + i * (bar_h + gap)
        label = f"{m['image']} {m['strategy']}"
        if m["strategy"] == "hybrid":
            label += f" n={m['n']}"
        label += f" w={m['workers']}"
        length = span * m["total_ms"] / peak
        color = palette.get(m["strategy"], "#8172b2")
        parts.append(f'<text x="{left - 6}" y="{y + bar_h - 5}" text-anchor="end">{escape(label)}</text>')
        parts.append(f'<rect x="{left}" y="{y}" width="{length:.2f}" height="{bar_h}" fill="{color}"/>')
        parts.append(f'<text x="{left + length + 4:.2f}" y="{y + bar_h - 5}">{m["total_ms"]:.1f} ms</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


@dataclass
class PartitionComparison:
    identical: bool
    component_counts: tuple
    rand_index: float

    def as_dict(self):
        return {
            "identical": self.identical,
            "component_counts": list(self.component_counts),
            "rand_index": self.rand_index,
        }


def partition_from_colors(img):
    """Component id per pixel, one id per distinct color."""
    d = img.data.astype(np.int64)
    codes = (d[..., 0] << 16) | (d[..., 1] << 8) | d[..., 2]
    _, ids = np.unique(codes.ravel(), return_inverse=True)
    return ids.ravel()


def _pairs(counts):
    counts = np.asarray(counts, dtype=np.int64)
    return int(np.sum(counts * (counts - 1) // 2))


def rand_index(x, y):
    """Exact Rand index of two labelings of the same items, by pair counting.

    Uses the contingency table: agreeing pairs are those together in both
    labelings plus those apart in both.
    """
    x = np.asarray(x).ravel()
    y = np.asarray(y).ravel()
    if x.shape != y.shape:
        raise ValueError("labelings cover different numbers of items")
    n = x.size
    total = n * (n - 1) // 2
    if total == 0:
        return 1.0
    _, xi = np.unique(x, return_inverse=True)
    _, yi = np.unique(y, return_inverse=True)
    xi = xi.ravel().astype(np.int64)
    yi = yi.ravel().astype(np.int64)
    _, joint = np.unique(xi * (int(yi.max()) + 1) + yi, return_counts=True)
    together_both = _pairs(joint)
    together_x = _pairs(np.bincount(xi))
    together_y = _pairs(np.bincount(yi))
    apart_both = total - together_x - together_y + together_both
    return (together_both + apart_both) / total


def compare_partitions(a, b):
    """Compare two rendered segmentations whose palettes are injective."""
    if (a.width, a.height) != (b.width, b.height):
        raise ValueError(f"dimension mismatch: {a.width}x{a.height} vs {b.width}x{b.height}")
    pa = partition_from_colors(a)
    pb = partition_from_colors(b)
    ca, cb = int(pa.max()) + 1, int(pb.max()) + 1
    joint = np.unique(pa.astype(np.int64) * cb + pb).size
    identical = ca == cb == joint
    ri = 1.0 if identical else rand_index(pa, pb)
    return PartitionComparison(identical, (ca, cb), ri)
