"""Pure-Python/numpy kernels.

Same call signatures and bit-identical results as the compiled ``_core``
extension. Used when the extension is not built, or when
``GRAPHSEG_PURE=1`` is set.
"""
import numpy as np

from ._types import EDGE_DTYPE

NAME = "pure"


def _pack(a, b, img_flat):
    d = img_flat[a] - img_flat[b]
    dr, dg, db = d[:, 0], d[:, 1], d[:, 2]
    out = np.empty(len(a), dtype=EDGE_DTYPE)
    out["w"] = np.sqrt(dr * dr + dg * dg + db * db)
    out["a"] = a
    out["b"] = b
    return out


def _generation_order(a, b):
    # (a, b) ascending is the order a row-major scan emits edges in
    return np.lexsort((b, a))


def rect_edges(img, ax0, ay0, ax1, ay1, rx0, ry0, rx1, ry1):
    """Edges whose source pixel lies in the a-rect and whose target lies in the r-rect.

    Rectangles are half-open ``[x0, x1) x [y0, y1)``; the a-rect must sit
    inside the r-rect.
    """
    h, w = img.shape[:2]
    xs = np.arange(ax0, ax1)
    ys = np.arange(ay0, ay1)
    gx, gy = np.meshgrid(xs, ys)
    gx = gx.ravel()
    gy = gy.ravel()
    src = []
    dst = []
    for dx, dy in ((1, 0), (-1, 1), (0, 1), (1, 1)):
        nx = gx + dx
        ny = gy + dy
        ok = (nx >= rx0) & (nx < rx1) & (ny >= ry0) & (ny < ry1)
        src.append(gy[ok] * w + gx[ok])
        dst.append(ny[ok] * w + nx[ok])
    a = np.concatenate(src).astype(np.int32)
    b = np.concatenate(dst).astype(np.int32)
    order = _generation_order(a, b)
    return _pack(a[order], b[order], img.reshape(h * w, 3))


def cross_edges(img, xtile, ytile):
    """Full-image edges whose endpoints fall in different tiles."""
    h, w = img.shape[:2]
    gx, gy = np.meshgrid(np.arange(w), np.arange(h))
    gx = gx.ravel()
    gy = gy.ravel()
    src = []
    dst = []
    for dx, dy in ((1, 0), (-1, 1), (0, 1), (1, 1)):
        nx = gx + dx
        ny = gy + dy
        ok = (nx >= 0) & (nx < w) & (ny < h)
        sx, sy, tx, ty = gx[ok], gy[ok], nx[ok], ny[ok]
        cross = (xtile[sx] != xtile[tx]) | (ytile[sy] != ytile[ty])
        src.append(sy[cross] * w + sx[cross])
        dst.append(ty[cross] * w + tx[cross])
    a = np.concatenate(src).astype(np.int32)
    b = np.concatenate(dst).astype(np.int32)
    order = _generation_order(a, b)
    return _pack(a[order], b[order], img.reshape(h * w, 3))


def reflect_index(idx, n):
    idx = np.asarray(idx) % (2 * n)
    return np.where(idx >= n, 2 * n - 1 - idx, idx)


def smooth_rows(src, taps, y0, y1):
    h, w = src.shape[:2]
    radius = len(taps) // 2
    rows = reflect_index(np.arange(y0 - radius, y1 + radius), h)
    cols = reflect_index(np.arange(-radius, w + radius), w)
    block = src[rows]
    # center + sum(tap * (neighbor - center)): equals the plain weighted sum
    # for unit-sum taps, and leaves constant regions exactly unchanged
    horiz = block.copy()
    for j, tap in enumerate(taps):
        if j != radius:
            horiz += tap * (block[:, cols[j:j + w]] - block)
    n = y1 - y0
    out = horiz[radius:radius + n].copy()
    for i, tap in enumerate(taps):
        if i != radius:
            out += tap * (horiz[i:i + n] - horiz[radius:radius + n])
    return out


def sort_edges(edges):
    order = np.lexsort((edges["b"], edges["a"], edges["w"]))
    return edges[order]


def merge_sorted(left, right):
    return sort_edges(np.concatenate([left, right]))


def _find(parent, v):
    root = v
    while parent[root] != root:
        root = parent[root]
    while parent[v] != root:
        parent[v], v = root, parent[v]
    return root


def _join(parent, rank, size, ra, rb):
    if rank[ra] < rank[rb]:
        ra, rb = rb, ra
    elif rank[ra] == rank[rb]:
        rank[ra] += 1
    parent[rb] = ra
    size[ra] += size[rb]
    return ra


def _load(*arrays):
    before = [arr.copy() for arr in arrays]
    return before, [old.tolist() for old in before]


def _store(arrays, before, lists):
    # write back only what this pass changed: concurrent passes on disjoint tiles share the arrays
    for arr, old, values in zip(arrays, before, lists):
        fresh = np.asarray(values, dtype=arr.dtype)
        changed = np.flatnonzero(fresh != old)
        arr[changed] = fresh[changed]


def threshold_pass(parent, rank, size, thresh, edges, k, trace=None):
    """Merge across each sorted edge whose weight fits both components' budgets.

    ``trace``, when a list, receives ``(weight, root, merged_size)`` per merge.
    """
    before, (p, r, s, t) = _load(parent, rank, size, thresh)
    merges = 0
    for w, a, b in zip(edges["w"].tolist(), edges["a"].tolist(), edges["b"].tolist()):
        ra = _find(p, a)
        rb = _find(p, b)
        if ra != rb and w <= t[ra] and w <= t[rb]:
            root = _join(p, r, s, ra, rb)
            t[root] = w + k / s[root]
            merges += 1
            if trace is not None:
                trace.append((w, root, s[root]))
    _store((parent, rank, size, thresh), before, (p, r, s, t))
    return merges


def minsize_pass(parent, rank, size, thresh, edges, min_size):
    before, (p, r, s) = _load(parent, rank, size)
    merges = 0
    for a, b in zip(edges["a"].tolist(), edges["b"].tolist()):
        ra = _find(p, a)
        rb = _find(p, b)
        if ra != rb and (s[ra] < min_size or s[rb] < min_size):
            _join(p, r, s, ra, rb)
            merges += 1
    _store((parent, rank, size), before, (p, r, s))
    return merges


def flatten(parent):
    """Point every vertex straight at its root; returns a copy of the result."""
    labels = parent.copy()
    while True:
        hop = labels[labels]
        if np.array_equal(hop, labels):
            break
        labels = hop
    parent[:] = labels
    return labels
