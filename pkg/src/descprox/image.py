"""Binary PPM I/O, cat-map image shuffling and two-pixel tracking.

Coordinates are ``(a, b) = (column, row)`` with the origin at the top-left,
so pixel ``(a, b)`` is ``pixels[b, a]``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from descprox.errors import DomainError, PPMError, ShapeError
from descprox.proximity import Probe
from descprox.systems import CAT_MATRIX, CatMap, matrix_power_mod, toroidal_distance

_WHITESPACE = b" \t\n\r\x0b\x0c"


@dataclass(frozen=True, eq=False)
class RasterImage:
    pixels: np.ndarray  # (height, width, 3) uint8

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 3:
            raise ShapeError(f"expected (height, width, 3) pixels, got {px.shape}")
        if px.dtype != np.uint8:
            if px.min(initial=0) < 0 or px.max(initial=0) > 255:
                raise ValueError("channel values must lie in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @property
    def square(self) -> bool:
        return self.width == self.height

    def color(self, p) -> tuple[int, int, int]:
        a, b = p
        if not (0 <= a < self.width and 0 <= b < self.height):
            raise DomainError(f"pixel {p} outside {self.width}x{self.height} image")
        return tuple(int(v) for v in self.pixels[b, a])

    def __eq__(self, other):
        return isinstance(other, RasterImage) and np.array_equal(self.pixels, other.pixels)

    def tobytes(self) -> bytes:
        return self.pixels.tobytes()


# -- PPM (P6) ----------------------------------------------------------------


def _skip_space_and_comments(data: bytes, i: int) -> int:
    while i < len(data):
        c = data[i:i + 1]
        if c in (b" ", b"\t", b"\n", b"\r", b"\x0b", b"\x0c"):
            i += 1
        elif c == b"#":
            while i < len(data) and data[i:i + 1] not in (b"\n", b"\r"):
                i += 1
        else:
            break
    return i


def _read_int(data: bytes, i: int, what: str) -> tuple[int, int]:
    i = _skip_space_and_comments(data, i)
    start = i
    while i < len(data) and data[i:i + 1].isdigit():
        i += 1
    if i == start:
        raise PPMError(f"expected {what}", start)
    return int(data[start:i]), i


def load_ppm(data: bytes) -> RasterImage:
    """Parse a binary P6 stream with maxval 255.  Header comments are skipped."""
    if data[:2] != b"P6":
        raise PPMError("missing P6 magic", 0)
    i = 2
    if i >= len(data) or data[i] not in _WHITESPACE and data[i:i + 1] != b"#":
        raise PPMError("expected whitespace after magic", i)
    width, i = _read_int(data, i, "width")
    height, i = _read_int(data, i, "height")
    maxval_at = _skip_space_and_comments(data, i)
    maxval, i = _read_int(data, i, "maxval")
    if width < 1 or height < 1:
        raise PPMError("image dimensions must be positive", maxval_at)
    if maxval != 255:
        raise PPMError(f"maxval must be 255, got {maxval}", maxval_at)
    if i >= len(data) or data[i] not in _WHITESPACE:
        raise PPMError("expected single whitespace before raster", i)
    i += 1
    need = 3 * width * height
    if len(data) - i < need:
        raise PPMError(f"truncated raster: need {need} bytes, have {len(data) - i}", len(data))
    px = np.frombuffer(data, dtype=np.uint8, count=need, offset=i).reshape(height, width, 3)
    return RasterImage(px.copy())


def save_ppm(image: RasterImage) -> bytes:
    header = b"P6\n%d %d\n255\n" % (image.width, image.height)
    return header + image.tobytes()


def read_ppm(path) -> RasterImage:
    with open(path, "rb") as fh:
        return load_ppm(fh.read())


def write_ppm(path, image: RasterImage) -> None:
    with open(path, "wb") as fh:
        fh.write(save_ppm(image))


# -- synthetic images ----------------------------------------------------------


def uniform_image(N: int, color=(128, 64, 192)) -> RasterImage:
    return RasterImage(np.broadcast_to(np.array(color, dtype=np.uint8), (N, N, 3)).copy())


def checker_image(N: int, cell: int = 1, dark=(0, 0, 0), light=(255, 255, 255)) -> RasterImage:
    rows, cols = np.indices((N, N))
    mask = ((rows // cell + cols // cell) % 2).astype(bool)
    px = np.where(mask[..., None], np.array(light, np.uint8), np.array(dark, np.uint8))
    return RasterImage(px.astype(np.uint8))


def gradient_image(N: int) -> RasterImage:
    """Distinct-ish colors: red grows with column, green with row, blue with both."""
    rows, cols = np.indices((N, N))
    scale = max(N - 1, 1)
    px = np.stack(
        [cols * 255 // scale, rows * 255 // scale, ((rows * 7 + cols * 13) % 256)], axis=-1
    )
    return RasterImage(px.astype(np.uint8))


SYNTHETIC = {"uniform": uniform_image, "checker": checker_image, "gradient": gradient_image}


def synthetic_image(kind: str, N: int) -> RasterImage:
    try:
        return SYNTHETIC[kind](N)
    except KeyError:
        raise ValueError(f"unknown synthetic image {kind!r}; choose from {sorted(SYNTHETIC)}") from None


def color_probe(image: RasterImage) -> Probe:
    """RGB of the fixed background at an object's current grid position."""
    return Probe("rgb", 3, image.color, exact=True, domain="grid",
                 accepts=lambda p: isinstance(p, tuple) and len(p) == 2)


# -- cat map on images -----------------------------------------------------------


def _require_square(image: RasterImage) -> int:
    if not image.square:
        raise ShapeError(f"cat map needs a square image, got {image.width}x{image.height}")
    return image.width


def cat_shuffle(image: RasterImage, t: int) -> RasterImage:
    """Move the pixel at ``p`` to ``cat^t(p)``; negative ``t`` undoes shuffles."""
    N = _require_square(image)
    if t < 0:
        t %= arnold_period(N)
    m = matrix_power_mod(CAT_MATRIX, t, N)
    b, a = np.indices((N, N))
    a2 = (m[0][0] * a + m[0][1] * b) % N
    b2 = (m[1][0] * a + m[1][1] * b) % N
    out = np.empty_like(image.pixels)
    out[b2, a2] = image.pixels[b, a]
    return RasterImage(out)


def arnold_period(N: int) -> int:
    """Order of the cat matrix modulo N, i.e. the smallest t with cat^t = id."""
    if N < 1:
        raise ValueError("N must be positive")
    if N == 1:
        return 1
    identity = ((1, 0), (0, 1))
    m = CAT_MATRIX
    t = 1
    while m != identity:
        m = tuple(
            tuple(sum(m[i][k] * CAT_MATRIX[k][j] for k in range(2)) % N for j in range(2))
            for i in range(2)
        )
        t += 1
    return t


# -- tracking ----------------------------------------------------------------------


@dataclass
class TrackRecord:
    N: int
    seeds: tuple
    positions: list  # per t: (p1, p2)
    metric_distance: list[float]
    gap_carried: list[float]
    gap_sampled: list[float]

    @property
    def steps(self) -> int:
        return len(self.positions) - 1


def _gap(c1, c2) -> float:
    return math.sqrt(sum((float(x) - float(y)) ** 2 for x, y in zip(c1, c2)))


def track_pixels(image: RasterImage, seeds, T: int) -> TrackRecord:
    """Follow two pixels under the cat map for ``t = 0..T``.

    The carried gap compares the colors the pixels started with, which travel
    with them; the sampled gap compares the background colors found at their
    current coordinates.
    """
    N = _require_square(image)
    seeds = tuple(tuple(int(v) for v in s) for s in seeds)
    if len(seeds) != 2:
        raise ValueError("tracking needs exactly two seeds")
    if seeds[0] == seeds[1]:
        raise ValueError("seeds must be distinct")
    for s in seeds:
        if not all(0 <= v < N for v in s):
            raise DomainError(f"seed {s} outside the {N}x{N} grid")
    if T < 1:
        raise ValueError("T must be positive")
    cat = CatMap(N)
    carried = _gap(image.color(seeds[0]), image.color(seeds[1]))
    p1, p2 = seeds
    positions, dist, gc, gs = [], [], [], []
    for _ in range(T + 1):
        positions.append((p1, p2))
        dist.append(toroidal_distance(p1, p2, N))
        gc.append(carried)
        gs.append(_gap(image.color(p1), image.color(p2)))
        p1, p2 = cat.step(p1), cat.step(p2)
    return TrackRecord(N, seeds, positions, dist, gc, gs)


@dataclass
class GapSummary:
    argmax_metric: int
    argmax_carried: int
    argmax_sampled: int
    max_sampled: float
    carried_constant: bool


def gap_report(record: TrackRecord, header=()) -> tuple[str, GapSummary]:
    """CSV rows ``t, x1, y1, x2, y2, metric_distance, gap_carried, gap_sampled`` and a summary."""
    buf = io.StringIO()
    for line in header:
        buf.write(f"# {line}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["t", "x1", "y1", "x2", "y2", "metric_distance", "gap_carried", "gap_sampled"])
    for t, ((p1, p2), d, gc, gs) in enumerate(
        zip(record.positions, record.metric_distance, record.gap_carried, record.gap_sampled)
    ):
        w.writerow([t, p1[0], p1[1], p2[0], p2[1], f"{d:.12g}", f"{gc:.12g}", f"{gs:.12g}"])
    summary = GapSummary(
        argmax_metric=int(np.argmax(record.metric_distance)),
        argmax_carried=int(np.argmax(record.gap_carried)),
        argmax_sampled=int(np.argmax(record.gap_sampled)),
        max_sampled=max(record.gap_sampled),
        carried_constant=len(set(record.gap_carried)) == 1,
    )
    buf.write(f"# argmax metric_distance t={summary.argmax_metric}\n")
    buf.write(f"# argmax gap_carried t={summary.argmax_carried}\n")
    buf.write(f"# argmax gap_sampled t={summary.argmax_sampled} value={summary.max_sampled:.12g}\n")
    return buf.getvalue(), summary
