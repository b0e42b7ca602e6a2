"""Rasterization of point sets into coverage buffers and density fields.

Marks are filled circles of a given pixel area, composited "over" a white
background with a shared opacity. Because every mark is the same monochrome
color, a pixel covered by k marks ends up with coverage 1 - (1-opacity)^k,
which is what render() computes: an integer per-pixel mark count first, then
the composited coverage via a power table built by repeated multiplication.
This makes rendering order-independent by construction and lets the design
sweep reuse one count buffer across all opacity levels of a design.
"""

from __future__ import annotations

import struct
import zlib
from dataclasses import dataclass

import numpy as np

__all__ = [
    "AREA_GRID",
    "OPACITY_GRID",
    "RenderParams",
    "CoverageBuffer",
    "DensityField",
    "mark_counts",
    "coverage_from_counts",
    "render",
    "densify",
    "to_png_bytes",
]

AREA_GRID = (20.0, 40.0, 60.0, 80.0)
OPACITY_GRID = (0.01, 0.05, 0.10, 0.20, 0.40, 0.80)

DEFAULT_SIZE = 700
FIELD_SHAPE = (20, 20)


@dataclass(frozen=True)
class RenderParams:
    """Visual encoding of one design: mark area (px^2), opacity, image size."""

    point_area: float
    opacity: float
    width: int = DEFAULT_SIZE
    height: int = DEFAULT_SIZE

    def __post_init__(self):
        if self.point_area <= 0:
            raise ValueError("point_area must be positive")
        if not 0.0 < self.opacity <= 1.0:
            raise ValueError("opacity must be in (0, 1]")

    @property
    def radius(self) -> float:
        return float(np.sqrt(self.point_area / np.pi))


@dataclass(frozen=True)
class CoverageBuffer:
    """Per-pixel accumulated mark opacity over white, in [0, 1]."""

    coverage: np.ndarray  # (height, width) float64

    @property
    def height(self) -> int:
        return self.coverage.shape[0]

    @property
    def width(self) -> int:
        return self.coverage.shape[1]


@dataclass(frozen=True)
class DensityField:
    """20x20 grid of mean coverage per cell block."""

    grid: np.ndarray  # (20, 20) float64
    cell_px: float


def mark_counts(points: np.ndarray, radius: float, width: int = DEFAULT_SIZE, height: int = DEFAULT_SIZE) -> np.ndarray:
    """Count, per pixel, how many circle marks cover the pixel center.

    A mark at normalized (x, y) is centered at (x*width, y*height); the pixel
    (row r, col c) has its center at (c+0.5, r+0.5) and is covered when the
    center lies within the radius (inclusive). Marks are clipped at the
    viewport; points outside the unit square contribute only where their
    circles intersect it.
    """
    counts = np.zeros((height, width), dtype=np.int64)
    pts = np.asarray(points, dtype=float)
    if pts.size == 0:
        return counts
    span = int(np.ceil(radius + 0.5)) + 1
    offsets = np.arange(-span, span + 1)
    r2 = radius * radius
    # Chunk to bound the candidate-pixel workspace for large point sets.
    chunk = max(1, int(1_000_000 / (offsets.size * offsets.size)))
    for start in range(0, len(pts), chunk):
        cx = pts[start : start + chunk, 0] * width
        cy = pts[start : start + chunk, 1] * height
        base_c = np.floor(cx).astype(np.int64)
        base_r = np.floor(cy).astype(np.int64)
        cand_c = base_c[:, None, None] + offsets[None, None, :]
        cand_r = base_r[:, None, None] + offsets[None, :, None]
        dx = cand_c + 0.5 - cx[:, None, None]
        dy = cand_r + 0.5 - cy[:, None, None]
        inside = (dx * dx + dy * dy <= r2) & (cand_c >= 0) & (cand_c < width) & (cand_r >= 0) & (cand_r < height)
        flat = (cand_r * width + cand_c)[inside]
        counts += np.bincount(flat, minlength=width * height).reshape(height, width)
    return counts


def coverage_from_counts(counts: np.ndarray, opacity: float) -> np.ndarray:
    """Composited coverage 1 - (1-opacity)^count, by repeated multiplication."""
    max_count = int(counts.max()) if counts.size else 0
    table = np.empty(max_count + 1)
    table[0] = 1.0
    q = 1.0 - opacity
    for k in range(1, max_count + 1):
        table[k] = table[k - 1] * q
    return 1.0 - table[counts]


def render(points: np.ndarray, params: RenderParams) -> CoverageBuffer:
    """Rasterize points (already subsampled, normalized) into a coverage buffer."""
    counts = mark_counts(points, params.radius, params.width, params.height)
    cov = coverage_from_counts(counts, params.opacity)
    cov.flags.writeable = False
    return CoverageBuffer(coverage=cov)


def densify(buf: CoverageBuffer, shape: tuple[int, int] = FIELD_SHAPE) -> DensityField:
    """Pool a coverage buffer into the density field by per-block mean."""
    rows, cols = shape
    if buf.height % rows or buf.width % cols:
        raise ValueError(f"buffer {buf.height}x{buf.width} not divisible into a {rows}x{cols} grid")
    bh, bw = buf.height // rows, buf.width // cols
    grid = buf.coverage.reshape(rows, bh, cols, bw).mean(axis=(1, 3))
    grid.flags.writeable = False
    return DensityField(grid=grid, cell_px=float(bh))


def to_png_bytes(buf: CoverageBuffer) -> bytes:
    """Encode the buffer as an 8-bit grayscale PNG of coverage*255.

    Rows are flipped so that y grows upward in the image, matching scatter
    plot orientation. Stdlib-only so the rendering core stays dependency-free.
    """
    gray = np.round(buf.coverage * 255.0).astype(np.uint8)[::-1]
    raw = b"".join(b"\x00" + row.tobytes() for row in gray)

    def chunk(tag: bytes, payload: bytes) -> bytes:
        data = tag + payload
        return struct.pack(">I", len(payload)) + data + struct.pack(">I", zlib.crc32(data))

    ihdr = struct.pack(">IIBBBBB", buf.width, buf.height, 8, 0, 0, 0, 0)
    return b"".join(
        [b"\x89PNG\r\n\x1a\n", chunk(b"IHDR", ihdr), chunk(b"IDAT", zlib.compress(raw, 6)), chunk(b"IEND", b"")]
    )
