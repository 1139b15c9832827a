"""Disjoint-set forest with per-root size and merge threshold."""
import numpy as np

from ._types import MAX_VERTICES
from .errors import ContractViolation, ParameterError


class ComponentForest:
    """Union-find over ``n`` vertices with union by rank and path compression.

    Four flat arrays hold the per-vertex state: ``parent`` (the component
    label), ``rank``, ``size`` and ``threshold``. ``size`` and ``threshold``
    are only meaningful at roots; read them through :meth:`find`.
    ``threshold`` stores the component's internal difference plus ``k / size``.
    """

    def __init__(self, vertex_count, k):
        if vertex_count < 1:
            raise ParameterError("vertex_count must be >= 1")
        if vertex_count > MAX_VERTICES:
            raise ParameterError("vertex_count exceeds 32-bit vertex ids")
        if not k >= 0:
            raise ParameterError(f"k must be >= 0, got {k}")
        self.k = float(k)
        self.parent = np.arange(vertex_count, dtype=np.int32)
        self.rank = np.zeros(vertex_count, dtype=np.int32)
        self.size = np.ones(vertex_count, dtype=np.int32)
        self.threshold = np.full(vertex_count, self.k, dtype=np.float64)

    def __len__(self):
        return len(self.parent)

    def find(self, v):
        parent = self.parent
        v = root = int(v)
        while parent[root] != root:
            root = int(parent[root])
        while parent[v] != root:
            parent[v], v = root, int(parent[v])
        return root

    def is_root(self, v):
        return self.parent[v] == v

    def join(self, ra, rb, new_threshold=None):
        """Union two distinct roots; returns the surviving root.

        The higher-rank root survives; on equal rank ``ra`` survives and its
        rank grows by one. ``new_threshold=None`` keeps the survivor's value.
        """
        if ra == rb:
            raise ContractViolation(f"cannot join root {ra} with itself")
        if not (self.is_root(ra) and self.is_root(rb)):
            raise ContractViolation(f"join needs two roots, got {ra} and {rb}")
        if self.rank[ra] < self.rank[rb]:
            ra, rb = rb, ra
        elif self.rank[ra] == self.rank[rb]:
            self.rank[ra] += 1
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        if new_threshold is not None:
            self.threshold[ra] = new_threshold
        return ra

    def roots(self):
        return np.flatnonzero(self.parent == np.arange(len(self.parent)))

    def component_count(self):
        return int(np.count_nonzero(self.parent == np.arange(len(self.parent))))

    def component_size(self, v):
        return int(self.size[self.find(v)])

    def copy(self):
        other = ComponentForest.__new__(ComponentForest)
        other.k = self.k
        other.parent = self.parent.copy()
        other.rank = self.rank.copy()
        other.size = self.size.copy()
        other.threshold = self.threshold.copy()
        return other


def init_forest(vertex_count, k):
    return ComponentForest(vertex_count, k)


def component_count(forest):
    return forest.component_count()
