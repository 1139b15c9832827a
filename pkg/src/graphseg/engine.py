"""Sequential, pipelined and hybrid (tile-and-stitch) execution strategies.

All three run the same pipeline: smooth, build the edge graph, sort it,
threshold-merge, size-merge, render. Sequential and pipelined produce
identical labels; hybrid with one tile does too.
"""
import os
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from . import _backend
from .agglomerate import STAGES, SegParams, extract_result, minsize_pass, threshold_pass
from .errors import ParameterError
from .forest import ComponentForest
from .graph import EdgeList, _float_samples, build_edges, merge_sorted, sort_edges
from .imaging import (
    Palette,
    RasterImage,
    gaussian_kernel,
    gaussian_smooth,
    render_labels,
    row_bands,
    smooth_rows,
)
from .tiling import boundary_edges, make_grid, stitch

STRATEGIES = ("sequential", "pipelined", "hybrid")


def default_workers():
    try:
        return len(os.sched_getaffinity(0))
    except AttributeError:
        return os.cpu_count() or 1


@dataclass(frozen=True)
class StrategyConfig:
    kind: str = "sequential"
    n: int = 4
    workers: int = None
    seed: int = 42

    def __post_init__(self):
        if self.kind not in STRATEGIES:
            raise ParameterError(f"unknown strategy {self.kind!r}")
        if self.kind == "hybrid" and self.n < 1:
            raise ParameterError("hybrid needs n >= 1")
        if self.workers is not None and self.workers < 1:
            raise ParameterError("workers must be >= 1")


class StageClock:
    """Wall-clock span per stage, from its earliest start to its latest end.

    Work items of one stage may run on several threads and interleave with
    other stages, so spans can overlap and their sum can exceed the total.
    """

    def __init__(self):
        self._lock = threading.Lock()
        self._spans = {}
        self._t0 = time.perf_counter()

    @contextmanager
    def stage(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            end = time.perf_counter()
            with self._lock:
                lo, hi = self._spans.get(name, (start, end))
                self._spans[name] = (min(lo, start), max(hi, end))

    def finish(self):
        total = time.perf_counter() - self._t0
        out = {}
        for name in STAGES:
            lo, hi = self._spans.get(name, (0.0, 0.0))
            out[name] = (hi - lo) * 1e3
        out["total"] = total * 1e3
        return out


def _as_image(img):
    if not isinstance(img, RasterImage):
        img = RasterImage(img)
    return img


def _finish(forest, img, seed, clock, workers=1):
    with clock.stage("render"):
        result = extract_result(forest, img.width, img.height)
        palette = Palette.for_labels(result.labels, seed)
        result.image = render_labels(result, palette, workers=workers)
    result.stage_timings = clock.finish()
    return result


def run_sequential(img, params=None, seed=42):
    params = params or SegParams()
    img = _as_image(img)
    clock = StageClock()
    with clock.stage("smooth"):
        smoothed = gaussian_smooth(img, params.sigma)
    with clock.stage("build"):
        edges = build_edges(smoothed)
        forest = ComponentForest(img.width * img.height, params.k)
    with clock.stage("sort"):
        edges = sort_edges(edges)
    with clock.stage("threshold"):
        threshold_pass(forest, edges, params.k)
    with clock.stage("minsize"):
        minsize_pass(forest, edges, params.min_size)
    return _finish(forest, img, seed, clock)


def _parallel_merge(pool, runs, clock):
    merge = _backend.kernels.merge_sorted

    def pair(left, right):
        with clock.stage("sort"):
            return merge(left, right)

    while len(runs) > 1:
        futs = [pool.submit(pair, runs[i], runs[i + 1]) for i in range(0, len(runs) - 1, 2)]
        tail = [runs[-1]] if len(runs) % 2 else []
        runs = [f.result() for f in futs] + tail
    return EdgeList(runs[0], sorted=True)


def run_pipelined(img, params=None, workers=None, seed=42):
    """Overlap smoothing, row-band edge construction, run sorting and forest setup.

    Smoothing runs per row band; as soon as a band and the first row of the
    next one are smoothed, that band's edges are built and sorted into a run.
    Runs are merged pairwise, then the two agglomeration scans run back to
    back on the merged list.
    """
    params = params or SegParams()
    img = _as_image(img)
    workers = workers or default_workers()
    h, w = img.height, img.width
    clock = StageClock()
    kern = _backend.kernels

    src = img.data.astype(np.float64)
    smoothed = np.empty_like(src)
    taps = gaussian_kernel(params.sigma)
    bands = row_bands(h, max(4, 2 * workers))

    def smooth_band(band):
        with clock.stage("smooth"):
            smoothed[band[0]:band[1]] = smooth_rows(src, taps, band[0], band[1])

    def edge_run(band):
        with clock.stage("build"):
            data = kern.rect_edges(smoothed, 0, band[0], w, band[1], 0, 0, w, h)
        with clock.stage("sort"):
            return kern.sort_edges(data)

    def init_forest():
        with clock.stage("build"):
            return ComponentForest(w * h, params.k)

    with ThreadPoolExecutor(max_workers=workers) as pool:
        forest_f = pool.submit(init_forest)
        smooth_fs = [pool.submit(smooth_band, b) for b in bands]
        run_fs = []
        for i, band in enumerate(bands):
            smooth_fs[i].result()
            if i + 1 < len(bands):
                smooth_fs[i + 1].result()
            run_fs.append(pool.submit(edge_run, band))
        edges = _parallel_merge(pool, [f.result() for f in run_fs], clock)
        forest = forest_f.result()

    with clock.stage("threshold"):
        threshold_pass(forest, edges, params.k)
    with clock.stage("minsize"):
        minsize_pass(forest, edges, params.min_size)
    return _finish(forest, img, seed, clock, workers)


def run_hybrid(img, params=None, n=4, workers=None, seed=42):
    """Segment ``n`` tiles independently, stitch the seams, then size-merge globally.

    Tile threshold passes run concurrently on one shared forest; each
    touches only its own tile's vertices. Stitching uses only direct
    (non-diagonal) seam neighbors, horizontal seams first. The final size
    pass scans the full sorted edge list, assembled by merging the sorted
    tile runs with the sorted cross-tile edges.
    """
    params = params or SegParams()
    img = _as_image(img)
    grid = make_grid(img.width, img.height, n)
    workers = min(workers or default_workers(), grid.n)
    clock = StageClock()
    kern = _backend.kernels

    with clock.stage("smooth"):
        smoothed = gaussian_smooth(img, params.sigma, workers=workers)
    samples = _float_samples(smoothed)
    with clock.stage("build"):
        forest = ComponentForest(img.width * img.height, params.k)
    xtile = grid.tile_of_column()
    ytile = grid.tile_of_row()

    def tile_task(rect):
        x0, y0, tw, th = rect
        with clock.stage("build"):
            data = kern.rect_edges(samples, x0, y0, x0 + tw, y0 + th, x0, y0, x0 + tw, y0 + th)
        with clock.stage("sort"):
            run = EdgeList(kern.sort_edges(data), sorted=True)
        with clock.stage("threshold"):
            threshold_pass(forest, run, params.k)
        return run.data

    def cross_task():
        with clock.stage("build"):
            data = kern.cross_edges(samples, xtile, ytile)
        with clock.stage("sort"):
            return kern.sort_edges(data)

    if workers == 1:
        runs = [tile_task(r) for r in grid.tile_rects]
        cross = cross_task()
        with clock.stage("sort"):
            edges = merge_sorted(runs + [cross])
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            tile_fs = [pool.submit(tile_task, r) for r in grid.tile_rects]
            cross_f = pool.submit(cross_task)
            runs = [f.result() for f in tile_fs] + [cross_f.result()]
            edges = _parallel_merge(pool, runs, clock)

    with clock.stage("threshold"):
        stitch(forest, boundary_edges(smoothed, grid), params.k)
    with clock.stage("minsize"):
        minsize_pass(forest, edges, params.min_size)
    return _finish(forest, img, seed, clock, workers)


def run(img, params=None, config=None):
    config = config or StrategyConfig()
    if config.kind == "sequential":
        return run_sequential(img, params, seed=config.seed)
    if config.kind == "pipelined":
        return run_pipelined(img, params, workers=config.workers, seed=config.seed)
    return run_hybrid(img, params, n=config.n, workers=config.workers, seed=config.seed)
