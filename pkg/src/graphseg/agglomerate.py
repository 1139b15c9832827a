"""Threshold-based and size-based agglomeration over a sorted edge list."""
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend, _pure
from .errors import ContractViolation, ParameterError

STAGES = ("smooth", "build", "sort", "threshold", "minsize", "render")


@dataclass(frozen=True)
class SegParams:
    """Segmentation parameters.

    ``k`` scales the size-dependent merge slack ``k / |C|``; ``min_size`` is
    the smallest component the size pass leaves alone.
    """

    k: float = 300.0
    min_size: int = 50
    sigma: float = 0.8

    def __post_init__(self):
        if not (math.isfinite(self.k) and self.k >= 0):
            raise ParameterError(f"k must be finite and >= 0, got {self.k}")
        if int(self.min_size) != self.min_size or self.min_size < 1:
            raise ParameterError(f"min_size must be an integer >= 1, got {self.min_size}")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ParameterError(f"sigma must be finite and >= 0, got {self.sigma}")


@dataclass
class SegmentationResult:
    labels: np.ndarray
    width: int
    height: int
    component_count: int
    stage_timings: dict = field(default_factory=dict)
    image: object = None

    @property
    def total_ms(self):
        return self.stage_timings.get("total", 0.0)

    def label_grid(self):
        return self.labels.reshape(self.height, self.width)


def _require_sorted(edges):
    if not edges.is_weight_sorted():
        raise ContractViolation("edge list must be sorted by non-decreasing weight")


def threshold_pass(forest, edges, k=None, trace=None):
    """Merge components whose connecting edge fits within both merge budgets.

    Edges are scanned in order. Two components merge when the edge weight
    is at most ``min(Int(Ci) + k/|Ci|, Int(Cj) + k/|Cj|)``; the survivor's
    budget becomes ``w + k / |merged|``, the edge weight being the new
    internal difference. Pass a list as ``trace`` to collect
    ``(weight, root, size)`` for every merge.
    """
    _require_sorted(edges)
    if k is None:
        k = forest.k
    kern = _pure if trace is not None else _backend.kernels
    args = (forest.parent, forest.rank, forest.size, forest.threshold, edges.data, float(k))
    if trace is not None:
        kern.threshold_pass(*args, trace=trace)
    else:
        kern.threshold_pass(*args)
    return forest


def minsize_pass(forest, edges, min_size):
    """Merge across each sorted edge while either side is smaller than ``min_size``."""
    _require_sorted(edges)
    _backend.kernels.minsize_pass(
        forest.parent, forest.rank, forest.size, forest.threshold, edges.data, int(min_size)
    )
    return forest


def extract_result(forest, width, height, timings=None):
    """Fully compress the forest and package the labels."""
    labels = _backend.kernels.flatten(forest.parent)
    count = int(np.count_nonzero(labels == np.arange(len(labels))))
    return SegmentationResult(labels, width, height, count, dict(timings or {}))
