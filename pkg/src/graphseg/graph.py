"""Pixel graph construction over the reduced 4-of-8 neighborhood.

Each pixel links to its right, down-left, down and down-right neighbors,
which yields every undirected 8-adjacency exactly once. Vertex ids are
row-major (``y * width + x``).
"""
import math
from typing import NamedTuple

import numpy as np

from . import _backend
from ._types import EDGE_DTYPE, MAX_VERTICES

# (dx, dy) in ascending target-id order
NEIGHBOR_OFFSETS = ((1, 0), (-1, 1), (0, 1), (1, 1))


class Edge(NamedTuple):
    a: int
    b: int
    w: float


class EdgeList:
    """Edges packed as a structured array with fields ``w``, ``a``, ``b``.

    When ``sorted`` is true the records are ordered by weight, ties by
    ``(a, b)``.
    """

    def __init__(self, data=None, sorted=False):
        if data is None:
            data = np.empty(0, dtype=EDGE_DTYPE)
        self.data = np.ascontiguousarray(data, dtype=EDGE_DTYPE)
        self.sorted = sorted

    @classmethod
    def from_edges(cls, edges):
        data = np.array([(w, a, b) for a, b, w in edges], dtype=EDGE_DTYPE)
        return cls(data)

    @property
    def a(self):
        return self.data["a"]

    @property
    def b(self):
        return self.data["b"]

    @property
    def w(self):
        return self.data["w"]

    def __len__(self):
        return len(self.data)

    def __iter__(self):
        for w, a, b in self.data.tolist():
            yield Edge(a, b, w)

    def __getitem__(self, i):
        w, a, b = self.data[i].tolist()
        return Edge(a, b, w)

    def is_weight_sorted(self):
        w = self.data["w"]
        return bool(np.all(w[1:] >= w[:-1]))

    def __repr__(self):
        return f"EdgeList({len(self)} edges, sorted={self.sorted})"


def neighbors_of(x, y, w, h):
    """Forward neighbors of pixel ``(x, y)`` as vertex ids, ascending."""
    out = []
    for dx, dy in NEIGHBOR_OFFSETS:
        nx, ny = x + dx, y + dy
        if 0 <= nx < w and ny < h:
            out.append(ny * w + nx)
    return out


def edge_weight(img, a, b):
    """Euclidean RGB distance between vertices ``a`` and ``b``."""
    flat = img.data.reshape(-1, 3)
    pa = flat[a].astype(np.float64)
    pb = flat[b].astype(np.float64)
    dr = float(pa[0] - pb[0])
    dg = float(pa[1] - pb[1])
    db = float(pa[2] - pb[2])
    return math.sqrt(dr * dr + dg * dg + db * db)


def expected_edge_count(w, h):
    return 4 * w * h - 3 * w - 3 * h + 2


def _float_samples(img):
    if img.width * img.height > MAX_VERTICES:
        raise ValueError("image has too many pixels for 32-bit vertex ids")
    return np.ascontiguousarray(img.data, dtype=np.float64)


def build_edges(img, rows=None):
    """All edges of the image graph in row-major emission order.

    ``rows`` restricts the source pixels to a half-open row band; targets
    may fall one row below it. Concatenating bands in order reproduces the
    whole-image list exactly.
    """
    src = _float_samples(img)
    y0, y1 = (0, img.height) if rows is None else rows
    data = _backend.kernels.rect_edges(
        src, 0, y0, img.width, y1, 0, 0, img.width, img.height
    )
    return EdgeList(data)


def sort_edges(edges):
    """Sort by weight, ties by ``(a, b)``. Returns a new list."""
    return EdgeList(_backend.kernels.sort_edges(edges.data), sorted=True)


def merge_sorted(runs):
    """Merge already-sorted runs into one sorted list (balanced pairwise merge)."""
    runs = [r.data if isinstance(r, EdgeList) else r for r in runs]
    if not runs:
        return EdgeList(sorted=True)
    merge = _backend.kernels.merge_sorted
    while len(runs) > 1:
        nxt = [merge(runs[i], runs[i + 1]) for i in range(0, len(runs) - 1, 2)]
        if len(runs) % 2:
            nxt.append(runs[-1])
        runs = nxt
    return EdgeList(runs[0], sorted=True)
