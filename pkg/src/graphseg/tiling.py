"""Tile decomposition and seam stitching for the hybrid strategy."""
from dataclasses import dataclass

import numpy as np

from . import _backend
from ._types import EDGE_DTYPE
from .agglomerate import threshold_pass
from .errors import GridError, ParameterError
from .graph import EdgeList, _float_samples

MIN_TILE_DIM = 2


def _split(length, parts):
    """Cut positions for ``parts`` contiguous pieces whose sizes differ by at most one."""
    base, extra = divmod(length, parts)
    cuts = [0]
    for i in range(parts):
        cuts.append(cuts[-1] + base + (1 if i < extra else 0))
    return cuts


def grid_shape(n):
    """``(cols, rows)`` with ``cols * rows == n``, ``cols >= rows``, closest to square."""
    rows = 1
    for d in range(1, int(n ** 0.5) + 1):
        if n % d == 0:
            rows = d
    return n // rows, rows


@dataclass(frozen=True)
class TileGrid:
    width: int
    height: int
    cols: int
    rows: int
    xcuts: tuple
    ycuts: tuple

    @property
    def n(self):
        return self.cols * self.rows

    @property
    def tile_rects(self):
        """``(x0, y0, width, height)`` per tile, row-major over the grid."""
        rects = []
        for r in range(self.rows):
            for c in range(self.cols):
                x0, x1 = self.xcuts[c], self.xcuts[c + 1]
                y0, y1 = self.ycuts[r], self.ycuts[r + 1]
                rects.append((x0, y0, x1 - x0, y1 - y0))
        return rects

    def tile_of_column(self):
        return np.repeat(np.arange(self.cols, dtype=np.int32), np.diff(self.xcuts))

    def tile_of_row(self):
        return np.repeat(np.arange(self.rows, dtype=np.int32), np.diff(self.ycuts))

    def tile_vertices(self, t):
        x0, y0, w, h = self.tile_rects[t]
        ys, xs = np.mgrid[y0:y0 + h, x0:x0 + w]
        return (ys * self.width + xs).ravel()


def make_grid(width, height, n):
    if int(n) != n or n < 1:
        raise ParameterError(f"tile count must be an integer >= 1, got {n}")
    n = int(n)
    cols, rows = grid_shape(n)
    # only a dimension that is actually split is held to the minimum
    if (cols > 1 and width // cols < MIN_TILE_DIM) or (rows > 1 and height // rows < MIN_TILE_DIM):
        raise GridError(
            f"n too large: a {cols}x{rows} grid on a {width}x{height} image "
            f"leaves tiles narrower than {MIN_TILE_DIM} pixels"
        )
    return TileGrid(width, height, cols, rows, tuple(_split(width, cols)), tuple(_split(height, rows)))


def tile_edges(img, grid, t, sort=True):
    """Edges with both endpoints inside tile ``t``, global vertex ids."""
    if not 0 <= t < grid.n:
        raise ParameterError(f"tile index {t} out of range for n={grid.n}")
    x0, y0, w, h = grid.tile_rects[t]
    data = _backend.kernels.rect_edges(
        _float_samples(img), x0, y0, x0 + w, y0 + h, x0, y0, x0 + w, y0 + h
    )
    if sort:
        return EdgeList(_backend.kernels.sort_edges(data), sorted=True)
    return EdgeList(data)


def cross_tile_edges(img, grid, sort=True):
    """Every full-graph edge (diagonals included) whose endpoints lie in different tiles."""
    data = _backend.kernels.cross_edges(
        _float_samples(img), grid.tile_of_column(), grid.tile_of_row()
    )
    if sort:
        return EdgeList(_backend.kernels.sort_edges(data), sorted=True)
    return EdgeList(data)


@dataclass
class BoundaryEdges:
    """Direct-neighbor seam edges: ``horizontal`` joins left/right tiles, ``vertical`` top/bottom."""

    horizontal: EdgeList
    vertical: EdgeList


def _seam_list(flat, a, b):
    a = np.asarray(a, dtype=np.int32)
    b = np.asarray(b, dtype=np.int32)
    d = flat[a] - flat[b]
    dr, dg, db = d[:, 0], d[:, 1], d[:, 2]
    data = np.empty(len(a), dtype=EDGE_DTYPE)
    data["w"] = np.sqrt(dr * dr + dg * dg + db * db)
    data["a"] = a
    data["b"] = b
    return EdgeList(_backend.kernels.sort_edges(data), sorted=True)


def boundary_edges(img, grid):
    flat = _float_samples(img).reshape(-1, 3)
    w = grid.width
    ys = np.arange(grid.height)
    xs = np.arange(grid.width)
    ha = [ys * w + (cut - 1) for cut in grid.xcuts[1:-1]]
    va = [(cut - 1) * w + xs for cut in grid.ycuts[1:-1]]
    ha = np.concatenate(ha) if ha else np.empty(0, dtype=np.int64)
    va = np.concatenate(va) if va else np.empty(0, dtype=np.int64)
    return BoundaryEdges(_seam_list(flat, ha, ha + 1), _seam_list(flat, va, va + w))


def stitch(forest, boundary, k=None):
    """Threshold-merge across horizontal seams, then vertical seams."""
    threshold_pass(forest, boundary.horizontal, k)
    threshold_pass(forest, boundary.vertical, k)
    return forest
