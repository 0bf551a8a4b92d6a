"""Minimal RGB raster handling: binary PPM I/O, crop, Gaussian blur.

Blur semantics are pinned so results reproduce bit-exactly: sigma equals
the requested radius, the 1-D kernel is truncated at ceil(3*sigma) taps
per side and renormalized, borders clamp to the edge pixel, channels are
independent, and rounding to 8 bits happens once after both separable
passes (floor(x + 0.5)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    BoxOutOfBounds,
    MalformedHeader,
    NonPositiveRadius,
    TruncatedPixelData,
)

CHANNELS = 3


@dataclass(frozen=True)
class Raster:
    """8-bit RGB image, row-major packed pixels."""

    width: int
    height: int
    pixels: bytes

    def __post_init__(self):
        if self.width <= 0 or self.height <= 0:
            raise ValueError(f"raster dims must be positive, got {self.width}x{self.height}")
        expect = self.width * self.height * CHANNELS
        if len(self.pixels) != expect:
            raise ValueError(f"pixel buffer has {len(self.pixels)} bytes, expected {expect}")

    def to_array(self) -> np.ndarray:
        """View as (height, width, 3) uint8."""
        return np.frombuffer(self.pixels, dtype=np.uint8).reshape(self.height, self.width, CHANNELS)

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "Raster":
        if arr.ndim != 3 or arr.shape[2] != CHANNELS:
            raise ValueError(f"expected (h, w, 3) array, got shape {arr.shape}")
        a = arr.astype(np.uint8, copy=False)
        return cls(width=a.shape[1], height=a.shape[0], pixels=a.tobytes())


@dataclass(frozen=True)
class BBox:
    """Pixel box, inclusive-exclusive: [x1, x2) x [y1, y2)."""

    x1: int
    y1: int
    x2: int
    y2: int

    def __post_init__(self):
        if not (0 <= self.x1 < self.x2 and 0 <= self.y1 < self.y2):
            raise ValueError(f"degenerate box {self}")

    @property
    def width(self) -> int:
        return self.x2 - self.x1

    @property
    def height(self) -> int:
        return self.y2 - self.y1

    def check_within(self, img: Raster) -> None:
        if self.x2 > img.width or self.y2 > img.height:
            raise BoxOutOfBounds(
                f"box {self} exceeds raster {img.width}x{img.height}"
            )


def _read_token(data: bytes, pos: int) -> tuple[bytes, int]:
    # Skip whitespace and '#' comments (to end of line), then read one token.
    n = len(data)
    while pos < n:
        c = data[pos : pos + 1]
        if c.isspace():
            pos += 1
        elif c == b"#":
            while pos < n and data[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
        else:
            break
    start = pos
    while pos < n and not data[pos : pos + 1].isspace():
        pos += 1
    if start == pos:
        raise MalformedHeader("unexpected end of header")
    return data[start:pos], pos


def read_ppm(data: bytes) -> Raster:
    """Parse a binary PPM (magic P6, maxval 255)."""
    if len(data) < 2 or data[:2] != b"P6":
        raise MalformedHeader(f"expected magic P6, got {data[:2]!r}")
    pos = 2
    fields = []
    for _ in range(3):
        tok, pos = _read_token(data, pos)
        if not tok.isdigit():
            raise MalformedHeader(f"non-numeric header field {tok!r}")
        fields.append(int(tok))
    width, height, maxval = fields
    if width <= 0 or height <= 0:
        raise MalformedHeader(f"non-positive dimensions {width}x{height}")
    if maxval != 255:
        raise MalformedHeader(f"only maxval 255 supported, got {maxval}")
    # Exactly one whitespace byte separates the header from pixel data.
    if pos >= len(data) or not data[pos : pos + 1].isspace():
        raise MalformedHeader("missing whitespace after maxval")
    pos += 1
    expect = width * height * CHANNELS
    payload = data[pos : pos + expect]
    if len(payload) < expect:
        raise TruncatedPixelData(f"got {len(payload)} pixel bytes, expected {expect}")
    return Raster(width=width, height=height, pixels=bytes(payload))


def write_ppm(img: Raster) -> bytes:
    header = f"P6\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels


def crop(img: Raster, box: BBox) -> Raster:
    box.check_within(img)
    arr = img.to_array()[box.y1 : box.y2, box.x1 : box.x2]
    return Raster.from_array(np.ascontiguousarray(arr))


def gaussian_kernel(sigma: float) -> np.ndarray:
    """1-D Gaussian taps at ceil(3*sigma) per side, renormalized to sum 1."""
    if not (sigma > 0) or not math.isfinite(sigma):
        raise NonPositiveRadius(f"radius must be positive, got {sigma}")
    taps = math.ceil(3.0 * sigma)
    offsets = np.arange(-taps, taps + 1, dtype=np.float64)
    w = np.exp(-0.5 * (offsets / sigma) ** 2)
    return w / w.sum()


def _convolve_axis(arr: np.ndarray, kernel: np.ndarray, axis: int) -> np.ndarray:
    taps = (len(kernel) - 1) // 2
    pad = [(0, 0)] * arr.ndim
    pad[axis] = (taps, taps)
    padded = np.pad(arr, pad, mode="edge")  # clamp-to-edge
    out = np.zeros_like(arr)
    n = arr.shape[axis]
    for k, w in enumerate(kernel):
        sl = [slice(None)] * arr.ndim
        sl[axis] = slice(k, k + n)
        out += w * padded[tuple(sl)]
    return out


def gaussian_blur(img: Raster, radius: float) -> Raster:
    """Separable Gaussian blur with sigma = radius, per channel."""
    kernel = gaussian_kernel(radius)
    acc = img.to_array().astype(np.float64)
    acc = _convolve_axis(acc, kernel, axis=1)
    acc = _convolve_axis(acc, kernel, axis=0)
    out = np.floor(np.clip(acc, 0.0, 255.0) + 0.5).astype(np.uint8)
    return Raster.from_array(out)


def background_blur(img: Raster, box: BBox, radius: float) -> Raster:
    """Blur everything outside the box; keep box pixels bit-identical."""
    box.check_within(img)
    blurred = gaussian_blur(img, radius).to_array().copy()
    src = img.to_array()
    blurred[box.y1 : box.y2, box.x1 : box.x2] = src[box.y1 : box.y2, box.x1 : box.x2]
    return Raster.from_array(blurred)
