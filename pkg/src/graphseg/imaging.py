"""Raster I/O, Gaussian pre-smoothing and label recoloring."""
import math
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from .errors import (
    ParameterError,
    PPMHeaderError,
    PPMMagicError,
    PPMMaxvalError,
    PPMTruncatedError,
)


class RasterImage:
    """An RGB pixel grid stored as a row-major ``(height, width, 3)`` array.

    The 8-bit variant (``uint8``) is what gets read and written; the float
    variant (``float64``) is what smoothing produces and edge weights use.
    """

    def __init__(self, data):
        data = np.asarray(data)
        if data.ndim != 3 or data.shape[2] != 3:
            raise ParameterError(f"expected (H, W, 3) samples, got shape {data.shape}")
        if data.shape[0] < 1 or data.shape[1] < 1:
            raise ParameterError("image must be at least 1x1")
        if data.dtype == np.uint8:
            pass
        elif np.issubdtype(data.dtype, np.floating):
            data = data.astype(np.float64, copy=False)
            if not np.all(np.isfinite(data)):
                raise ParameterError("float samples must be finite")
        else:
            raise ParameterError(f"unsupported sample type {data.dtype}")
        self.data = np.ascontiguousarray(data)

    @property
    def width(self):
        return self.data.shape[1]

    @property
    def height(self):
        return self.data.shape[0]

    @property
    def is_float(self):
        return self.data.dtype == np.float64

    def as_float(self):
        return RasterImage(self.data.astype(np.float64))

    def __eq__(self, other):
        if not isinstance(other, RasterImage):
            return NotImplemented
        return self.data.dtype == other.data.dtype and np.array_equal(self.data, other.data)

    def __repr__(self):
        kind = "float" if self.is_float else "uint8"
        return f"RasterImage({self.width}x{self.height}, {kind})"


_TOKEN = re.compile(rb"\s*(\d+)")


def read_ppm(data):
    """Parse a binary ``P6`` stream with maxval 255."""
    data = bytes(data)
    if data[:2] != b"P6":
        raise PPMMagicError(f"unsupported magic {data[:2]!r}, expected b'P6'", 0)
    pos = 2
    values = []
    for name in ("width", "height", "maxval"):
        if pos >= len(data) or not data[pos:pos + 1].isspace():
            raise PPMHeaderError(f"expected whitespace before {name}", pos)
        m = _TOKEN.match(data, pos)
        if m is None:
            raise PPMHeaderError(f"expected decimal {name}", pos)
        values.append((int(m.group(1)), m.start(1)))
        pos = m.end()
    (width, wpos), (height, hpos), (maxval, mpos) = values
    if width < 1:
        raise PPMHeaderError("width must be >= 1", wpos)
    if height < 1:
        raise PPMHeaderError("height must be >= 1", hpos)
    if maxval != 255:
        raise PPMMaxvalError(f"maxval {maxval} unsupported, expected 255", mpos)
    if pos >= len(data) or not data[pos:pos + 1].isspace():
        raise PPMHeaderError("expected single whitespace after maxval", pos)
    pos += 1
    need = width * height * 3
    payload = data[pos:pos + need]
    if len(payload) < need:
        raise PPMTruncatedError(
            f"payload has {len(payload)} of {need} bytes", pos + len(payload)
        )
    pixels = np.frombuffer(payload, dtype=np.uint8).reshape(height, width, 3)
    return RasterImage(pixels.copy())


def write_ppm(img):
    if img.data.dtype != np.uint8:
        raise ParameterError("write_ppm needs the 8-bit variant")
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.data.tobytes()


def load_ppm(path):
    with open(path, "rb") as fh:
        return read_ppm(fh.read())


def save_ppm(path, img):
    with open(path, "wb") as fh:
        fh.write(write_ppm(img))


@dataclass(frozen=True)
class SmoothingParams:
    sigma: float = 0.8
    boundary_mode: str = "reflect"

    def __post_init__(self):
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ParameterError(f"sigma must be finite and >= 0, got {self.sigma}")
        if self.boundary_mode != "reflect":
            raise ParameterError("only reflect boundaries are supported")


def gaussian_kernel(sigma):
    """Normalized 1-D Gaussian taps over ``[-ceil(3*sigma), ceil(3*sigma)]``."""
    if sigma < 0:
        raise ParameterError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0:
        return np.ones(1)
    radius = math.ceil(3 * sigma)
    x = np.arange(-radius, radius + 1, dtype=np.float64)
    taps = np.exp(-(x * x) / (2 * sigma * sigma))
    return taps / taps.sum()


def smooth_rows(src, taps, y0, y1):
    """Smoothed output rows ``[y0, y1)`` of ``src`` (float ``(H, W, 3)``).

    Every output sample goes through the same floating-point operations
    however the rows are banded, so banded and whole-image smoothing agree
    bit for bit.
    """
    return _backend.kernels.smooth_rows(
        np.ascontiguousarray(src, dtype=np.float64), np.asarray(taps, dtype=np.float64), y0, y1
    )


def row_bands(height, count):
    """Split ``range(height)`` into ``count`` near-equal contiguous bands."""
    count = max(1, min(count, height))
    edges = [height * i // count for i in range(count + 1)]
    return [(edges[i], edges[i + 1]) for i in range(count)]


def gaussian_smooth(img, params=None, workers=1):
    """Separable Gaussian blur per channel; returns the float variant."""
    if params is None:
        params = SmoothingParams()
    elif not isinstance(params, SmoothingParams):
        params = SmoothingParams(float(params))
    src = img.data.astype(np.float64)
    if params.sigma == 0:
        return RasterImage(src)
    taps = gaussian_kernel(params.sigma)
    out = np.empty_like(src)
    bands = row_bands(img.height, workers)

    def fill(band):
        y0, y1 = band
        out[y0:y1] = smooth_rows(src, taps, y0, y1)

    if len(bands) == 1:
        fill(bands[0])
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, bands))
    return RasterImage(out)


@dataclass
class Palette:
    """Colors for a set of root labels, drawn from a seeded generator.

    ``roots[i]`` gets ``colors[i]``. Roots are listed in order of first
    appearance in a raster scan, so the coloring depends only on the
    partition and the seed.
    """

    seed: int
    roots: np.ndarray
    colors: np.ndarray = field(repr=False)

    @property
    def mapping(self):
        return {int(r): tuple(int(c) for c in col) for r, col in zip(self.roots, self.colors)}

    @classmethod
    def for_labels(cls, labels, seed=42):
        labels = np.asarray(labels).ravel()
        roots, first = np.unique(labels, return_index=True)
        roots = roots[np.argsort(first, kind="stable")]
        return cls(seed, roots, _distinct_colors(len(roots), seed))


def _distinct_colors(count, seed, space=1 << 24):
    if count > space:
        raise ParameterError(f"{count} components cannot get distinct 24-bit colors")
    rng = np.random.default_rng(seed)
    codes = rng.integers(0, space, size=count)
    while True:
        _, keep = np.unique(codes, return_index=True)
        redraw = np.ones(count, dtype=bool)
        redraw[keep] = False
        if not redraw.any():
            break
        codes[redraw] = rng.integers(0, space, size=int(redraw.sum()))
    return np.stack([(codes >> 16) & 255, (codes >> 8) & 255, codes & 255], axis=-1).astype(np.uint8)


def color_lookup(labels, palette):
    """Per-vertex index into ``palette.colors``."""
    lut = np.zeros(int(labels.max()) + 1, dtype=np.int64)
    lut[palette.roots] = np.arange(len(palette.roots))
    return lut[labels]


def render_labels(result, palette, workers=1):
    """Paint every pixel with its component's palette color."""
    labels = np.asarray(result.labels)
    idx = color_lookup(labels, palette).reshape(result.height, result.width)
    out = np.empty((result.height, result.width, 3), dtype=np.uint8)
    bands = row_bands(result.height, workers)

    def fill(band):
        y0, y1 = band
        out[y0:y1] = palette.colors[idx[y0:y1]]

    if len(bands) == 1:
        fill(bands[0])
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(fill, bands))
    return RasterImage(out)
