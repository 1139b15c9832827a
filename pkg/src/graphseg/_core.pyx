# distutils: language = c++
"""Compiled kernels for edge construction, sorting and agglomeration.

Every function mirrors one in ``_pure`` and produces identical output.
All heavy loops run without the GIL so tile and band workers scale
across threads.
"""
import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt
from libc.stdint cimport int32_t

from ._types import EDGE_DTYPE

cnp.import_array()

NAME = "core"

cdef extern from * nogil:
    """
    #include <algorithm>
    #include <cstdint>
    #include <cstring>
    #include <vector>
    struct gs_edge {
        double w;
        int32_t a;
        int32_t b;
    };
    struct gs_less {
        inline bool operator()(const gs_edge& x, const gs_edge& y) const {
            if (x.w != y.w) return x.w < y.w;
            if (x.a != y.a) return x.a < y.a;
            return x.b < y.b;
        }
    };
    static inline uint64_t gs_wkey(double w) {
        uint64_t bits;
        w = w + 0.0;  /* folds -0.0 into +0.0 */
        std::memcpy(&bits, &w, sizeof bits);
        return (bits >> 63) ? ~bits : (bits | 0x8000000000000000ULL);
    }
    static inline uint32_t gs_digit(const gs_edge& e, int pass) {
        /* pass 0-3: weight, low 16 bits first; 4-5: a; 6-7: b */
        if (pass < 4) return (uint32_t)(gs_wkey(e.w) >> (16 * pass)) & 0xFFFFu;
        if (pass < 6) return ((uint32_t)e.a >> (16 * (pass - 4))) & 0xFFFFu;
        return ((uint32_t)e.b >> (16 * (pass - 6))) & 0xFFFFu;
    }
    /* Stable LSD radix sort on (w, a, b). Edges already in (a, b) order,
       which is how the graph builders emit them, only need the weight passes. */
    static void gs_sort(gs_edge* first, gs_edge* last) {
        size_t n = (size_t)(last - first);
        if (n < 2) return;
        if (n < 256) { std::sort(first, last, gs_less()); return; }
        bool ab_ordered = true;
        for (size_t i = 1; i < n; ++i) {
            if (first[i - 1].a > first[i].a ||
                (first[i - 1].a == first[i].a && first[i - 1].b > first[i].b)) {
                ab_ordered = false;
                break;
            }
        }
        static const int full_order[8] = {6, 7, 4, 5, 0, 1, 2, 3};
        const int* order = ab_ordered ? full_order + 4 : full_order;
        int passes = ab_ordered ? 4 : 8;
        std::vector<gs_edge> buf(n);
        std::vector<size_t> count(65536);
        gs_edge* src = first;
        gs_edge* dst = buf.data();
        for (int p = 0; p < passes; ++p) {
            int pass = order[p];
            std::fill(count.begin(), count.end(), 0);
            for (size_t i = 0; i < n; ++i) ++count[gs_digit(src[i], pass)];
            if (count[gs_digit(src[0], pass)] == n) continue;
            size_t total = 0;
            for (size_t d = 0; d < 65536; ++d) {
                size_t c = count[d];
                count[d] = total;
                total += c;
            }
            for (size_t i = 0; i < n; ++i) dst[count[gs_digit(src[i], pass)]++] = src[i];
            std::swap(src, dst);
        }
        if (src != first) std::copy(src, src + n, first);
    }
    static void gs_merge(const gs_edge* a0, const gs_edge* a1,
                         const gs_edge* b0, const gs_edge* b1, gs_edge* out) {
        std::merge(a0, a1, b0, b1, out, gs_less());
    }
    """
    ctypedef struct gs_edge:
        double w
        int32_t a
        int32_t b
    void gs_sort(gs_edge* first, gs_edge* last)
    void gs_merge(const gs_edge* a0, const gs_edge* a1,
                  const gs_edge* b0, const gs_edge* b1, gs_edge* out)


cdef inline double _weight(const double[:, :, ::1] img, Py_ssize_t xa, Py_ssize_t ya,
                           Py_ssize_t xb, Py_ssize_t yb) noexcept nogil:
    cdef double dr = img[ya, xa, 0] - img[yb, xb, 0]
    cdef double dg = img[ya, xa, 1] - img[yb, xb, 1]
    cdef double db = img[ya, xa, 2] - img[yb, xb, 2]
    return sqrt(dr * dr + dg * dg + db * db)


cdef inline void _put(gs_edge* out, Py_ssize_t* n, const double[:, :, ::1] img,
                      Py_ssize_t width, Py_ssize_t xa, Py_ssize_t ya,
                      Py_ssize_t xb, Py_ssize_t yb) noexcept nogil:
    out[n[0]].w = _weight(img, xa, ya, xb, yb)
    out[n[0]].a = <int32_t>(ya * width + xa)
    out[n[0]].b = <int32_t>(yb * width + xb)
    n[0] += 1


cdef gs_edge* _ptr(cnp.ndarray arr):
    return <gs_edge*>cnp.PyArray_DATA(arr)


def _alloc(Py_ssize_t n):
    return np.empty(n, dtype=EDGE_DTYPE)


def rect_edges(const double[:, :, ::1] img, Py_ssize_t ax0, Py_ssize_t ay0,
               Py_ssize_t ax1, Py_ssize_t ay1, Py_ssize_t rx0, Py_ssize_t ry0,
               Py_ssize_t rx1, Py_ssize_t ry1):
    cdef Py_ssize_t width = img.shape[1]
    cdef Py_ssize_t cap = 4 * max(ax1 - ax0, 0) * max(ay1 - ay0, 0)
    cdef cnp.ndarray out = _alloc(cap)
    cdef gs_edge* e = _ptr(out)
    cdef Py_ssize_t n = 0, x, y
    cdef bint down
    with nogil:
        for y in range(ay0, ay1):
            down = y + 1 < ry1
            for x in range(ax0, ax1):
                if x + 1 < rx1:
                    _put(e, &n, img, width, x, y, x + 1, y)
                if down:
                    if x - 1 >= rx0:
                        _put(e, &n, img, width, x, y, x - 1, y + 1)
                    _put(e, &n, img, width, x, y, x, y + 1)
                    if x + 1 < rx1:
                        _put(e, &n, img, width, x, y, x + 1, y + 1)
    return out[:n].copy()


def cross_edges(const double[:, :, ::1] img, const int32_t[::1] xtile,
                const int32_t[::1] ytile):
    cdef Py_ssize_t h = img.shape[0], width = img.shape[1]
    cdef cnp.ndarray out = _alloc(4 * h * width)
    cdef gs_edge* e = _ptr(out)
    cdef Py_ssize_t n = 0, x, y
    cdef bint down, ynew
    with nogil:
        for y in range(h):
            down = y + 1 < h
            ynew = down and ytile[y] != ytile[y + 1]
            for x in range(width):
                if x + 1 < width and xtile[x] != xtile[x + 1]:
                    _put(e, &n, img, width, x, y, x + 1, y)
                if down:
                    if x >= 1 and (ynew or xtile[x] != xtile[x - 1]):
                        _put(e, &n, img, width, x, y, x - 1, y + 1)
                    if ynew:
                        _put(e, &n, img, width, x, y, x, y + 1)
                    if x + 1 < width and (ynew or xtile[x] != xtile[x + 1]):
                        _put(e, &n, img, width, x, y, x + 1, y + 1)
    return out[:n].copy()


def sort_edges(cnp.ndarray edges):
    cdef cnp.ndarray out = np.ascontiguousarray(edges, dtype=EDGE_DTYPE).copy()
    cdef gs_edge* e = _ptr(out)
    cdef Py_ssize_t n = out.shape[0]
    with nogil:
        gs_sort(e, e + n)
    return out


def merge_sorted(cnp.ndarray left, cnp.ndarray right):
    left = np.ascontiguousarray(left, dtype=EDGE_DTYPE)
    right = np.ascontiguousarray(right, dtype=EDGE_DTYPE)
    cdef Py_ssize_t nl = left.shape[0], nr = right.shape[0]
    cdef cnp.ndarray out = _alloc(nl + nr)
    cdef gs_edge* l = _ptr(left)
    cdef gs_edge* r = _ptr(right)
    cdef gs_edge* o = _ptr(out)
    with nogil:
        gs_merge(l, l + nl, r, r + nr, o)
    return out


cdef inline int32_t _find(int32_t* parent, int32_t v) noexcept nogil:
    cdef int32_t root = v, nxt
    while parent[root] != root:
        root = parent[root]
    while parent[v] != root:
        nxt = parent[v]
        parent[v] = root
        v = nxt
    return root


cdef inline int32_t _join(int32_t* parent, int32_t* rank, int32_t* size,
                          int32_t ra, int32_t rb) noexcept nogil:
    cdef int32_t tmp
    if rank[ra] < rank[rb]:
        tmp = ra
        ra = rb
        rb = tmp
    elif rank[ra] == rank[rb]:
        rank[ra] += 1
    parent[rb] = ra
    size[ra] += size[rb]
    return ra


def threshold_pass(int32_t[::1] parent, int32_t[::1] rank, int32_t[::1] size,
                   double[::1] thresh, cnp.ndarray edges, double k, trace=None):
    if trace is not None:
        raise TypeError("tracing is only supported by the pure backend")
    edges = np.ascontiguousarray(edges, dtype=EDGE_DTYPE)
    cdef gs_edge* e = _ptr(edges)
    cdef Py_ssize_t i, n = edges.shape[0], merges = 0
    cdef int32_t* p = &parent[0]
    cdef int32_t* r = &rank[0]
    cdef int32_t* s = &size[0]
    cdef double* t = &thresh[0]
    cdef int32_t ra, rb, root
    cdef double w
    with nogil:
        for i in range(n):
            w = e[i].w
            ra = _find(p, e[i].a)
            rb = _find(p, e[i].b)
            if ra != rb and w <= t[ra] and w <= t[rb]:
                root = _join(p, r, s, ra, rb)
                t[root] = w + k / <double>s[root]
                merges += 1
    return merges


def minsize_pass(int32_t[::1] parent, int32_t[::1] rank, int32_t[::1] size,
                 double[::1] thresh, cnp.ndarray edges, Py_ssize_t min_size):
    edges = np.ascontiguousarray(edges, dtype=EDGE_DTYPE)
    cdef gs_edge* e = _ptr(edges)
    cdef Py_ssize_t i, n = edges.shape[0], merges = 0
    cdef int32_t* p = &parent[0]
    cdef int32_t* r = &rank[0]
    cdef int32_t* s = &size[0]
    cdef int32_t ra, rb
    with nogil:
        for i in range(n):
            ra = _find(p, e[i].a)
            rb = _find(p, e[i].b)
            if ra != rb and (s[ra] < min_size or s[rb] < min_size):
                _join(p, r, s, ra, rb)
                merges += 1
    return merges


def flatten(int32_t[::1] parent):
    cdef Py_ssize_t v, n = parent.shape[0]
    cdef int32_t* p = &parent[0]
    with nogil:
        for v in range(n):
            _find(p, <int32_t>v)
    return np.asarray(parent).copy()


def smooth_rows(const double[:, :, ::1] src, const double[::1] taps, Py_ssize_t y0, Py_ssize_t y1):
    cdef Py_ssize_t h = src.shape[0], w = src.shape[1]
    cdef Py_ssize_t radius = taps.shape[0] // 2, n = y1 - y0
    cdef Py_ssize_t nrows = n + 2 * radius
    cdef cnp.int64_t[::1] rows = _reflect(np.arange(y0 - radius, y1 + radius), h)
    cdef cnp.int64_t[::1] cols = _reflect(np.arange(-radius, w + radius), w)
    horiz_arr = np.empty((nrows, w, 3))
    out_arr = np.empty((n, w, 3))
    cdef double[:, :, ::1] horiz = horiz_arr
    cdef double[:, :, ::1] out = out_arr
    cdef Py_ssize_t i, j, x, c, y
    cdef double center, acc
    with nogil:
        for i in range(nrows):
            y = rows[i]
            for x in range(w):
                for c in range(3):
                    center = src[y, x, c]
                    acc = center
                    for j in range(2 * radius + 1):
                        if j != radius:
                            acc = acc + taps[j] * (src[y, cols[x + j], c] - center)
                    horiz[i, x, c] = acc
        for i in range(n):
            for x in range(w):
                for c in range(3):
                    center = horiz[i + radius, x, c]
                    acc = center
                    for j in range(2 * radius + 1):
                        if j != radius:
                            acc = acc + taps[j] * (horiz[i + j, x, c] - center)
                    out[i, x, c] = acc
    return out_arr


def _reflect(idx, Py_ssize_t n):
    idx = idx % (2 * n)
    return np.ascontiguousarray(np.where(idx >= n, 2 * n - 1 - idx, idx), dtype=np.int64)
