"""Grayscale image workloads scored against an exact baseline.

Two pixel pipelines exercise a multiplier: blending (pixel products
scaled back to 8 bits) and Sobel edge detection (exact small-constant
convolution, squaring through the multiplier under test, exact integer
square root).  PSNR compares the results; binary PGM (P5, maxval 255)
is the only file format.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

SYNTHETIC_PAIRS = ("gradients", "checker")

_SOBEL_X = ((-1, 0, 1), (-2, 0, 2), (-1, 0, 1))
_SOBEL_Y = ((-1, -2, -1), (0, 0, 0), (1, 2, 1))


class ImageError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class GrayImage:
    width: int
    height: int
    pixels: np.ndarray  # shape (height, width), uint8

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.shape != (self.height, self.width):
            raise ImageError(
                f"pixel array shape {px.shape} does not match "
                f"{self.height}x{self.width}")
        if px.dtype != np.uint8:
            if px.size and (px.min() < 0 or px.max() > 255):
                raise ImageError("intensities must lie in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)

    def same_pixels(self, other: "GrayImage") -> bool:
        return (self.width, self.height) == (other.width, other.height) \
            and bool(np.array_equal(self.pixels, other.pixels))


def read_pgm(data: bytes) -> GrayImage:
    """Parse a binary PGM (P5) with maxval 255."""
    magic, pos = _token(data, 0)
    if magic != b"P5":
        raise ImageError(f"unsupported PGM format {magic.decode('ascii', 'replace')} "
                         "(binary P5 required)")
    fields = []
    for _ in range(3):
        tok, pos = _token(data, pos)
        try:
            fields.append(int(tok))
        except ValueError:
            raise ImageError(f"malformed PGM header token {tok!r}") from None
    width, height, maxval = fields
    if width < 1 or height < 1:
        raise ImageError(f"bad PGM dimensions {width}x{height}")
    if maxval != 255:
        raise ImageError(f"only maxval 255 is supported, got {maxval}")
    pos += 1  # single whitespace byte after maxval
    payload = data[pos:pos + width * height]
    if len(payload) < width * height:
        raise ImageError("truncated PGM payload")
    px = np.frombuffer(payload, dtype=np.uint8).reshape(height, width)
    return GrayImage(width, height, px)


def _token(data: bytes, pos: int) -> tuple[bytes, int]:
    n = len(data)
    while pos < n:
        c = data[pos:pos + 1]
        if c == b"#":
            while pos < n and data[pos:pos + 1] != b"\n":
                pos += 1
        elif c.isspace():
            pos += 1
        else:
            break
    if pos >= n:
        raise ImageError("truncated PGM header")
    start = pos
    while pos < n and not data[pos:pos + 1].isspace():
        pos += 1
    return data[start:pos], pos


def write_pgm(img: GrayImage) -> bytes:
    header = f"P5\n{img.width} {img.height}\n255\n".encode("ascii")
    return header + img.pixels.tobytes()


def blend_images(a: GrayImage, b: GrayImage, mult) -> GrayImage:
    """Pixelwise product scaled back to 8 bits: (a*b) >> 8, clamped."""
    if (a.width, a.height) != (b.width, b.height):
        raise ImageError("blend requires equal image dimensions")
    pa = a.pixels.reshape(-1).astype(np.uint64)
    pb = b.pixels.reshape(-1).astype(np.uint64)
    if hasattr(mult, "batch"):
        prod = np.ascontiguousarray(mult.batch(pa, pb), dtype=np.uint64)
    else:
        prod = np.fromiter((mult(int(x), int(y)) for x, y in zip(pa, pb)),
                           dtype=np.uint64, count=pa.size)
    out = np.clip(prod >> np.uint64(8), 0, 255).astype(np.uint8)
    return GrayImage(a.width, a.height, out.reshape(a.height, a.width))


def sobel_edge(img: GrayImage, mult16) -> GrayImage:
    """Edge magnitudes floor(sqrt(gx^2 + gy^2)), borders zero.

    The 3x3 convolutions use exact arithmetic; the squarings go through
    mult16.  mult16 must accept signed scalars; when it exposes .batch
    the magnitudes are squared vectorized (squaring is sign-invariant).
    The square root is an exact integer root, clamped to [0, 255].
    """
    if img.width < 3 or img.height < 3:
        raise ImageError("edge detection requires at least a 3x3 image")
    px = img.pixels.astype(np.int64)
    gx = _convolve3(px, _SOBEL_X)
    gy = _convolve3(px, _SOBEL_Y)
    sq_x = _square(mult16, gx)
    sq_y = _square(mult16, gy)
    mag = _isqrt_exact(sq_x + sq_y)
    out = np.zeros((img.height, img.width), dtype=np.uint8)
    out[1:-1, 1:-1] = np.clip(mag, 0, 255).astype(np.uint8)
    return GrayImage(img.width, img.height, out)


def _convolve3(px: np.ndarray, kernel) -> np.ndarray:
    h, w = px.shape
    acc = np.zeros((h - 2, w - 2), dtype=np.int64)
    for dy in range(3):
        for dx in range(3):
            k = kernel[dy][dx]
            if k:
                acc += k * px[dy:dy + h - 2, dx:dx + w - 2]
    return acc


def _square(mult16, g: np.ndarray) -> np.ndarray:
    mag = np.abs(g).reshape(-1).astype(np.uint64)
    if hasattr(mult16, "batch"):
        sq = np.ascontiguousarray(mult16.batch(mag, mag), dtype=np.uint64)
    else:
        sq = np.fromiter((mult16(int(v), int(v)) for v in g.reshape(-1)),
                         dtype=np.uint64, count=mag.size)
    return sq.reshape(g.shape)


def _isqrt_exact(v: np.ndarray) -> np.ndarray:
    s = np.floor(np.sqrt(v.astype(np.float64))).astype(np.uint64)
    s = np.where((s + 1) * (s + 1) <= v, s + 1, s)  # float rounded down
    s = np.where(s * s > v, s - 1, s)               # float rounded up
    return s


def psnr(reference: GrayImage, test: GrayImage) -> float:
    """10*log10(255^2/MSE); +inf for identical images."""
    if (reference.width, reference.height) != (test.width, test.height):
        raise ImageError("PSNR requires equal image dimensions")
    diff = reference.pixels.astype(np.float64) - test.pixels.astype(np.float64)
    mse = float(np.mean(diff * diff))
    if mse == 0.0:
        return math.inf
    return 10.0 * math.log10(255.0 ** 2 / mse)


def synthetic_pair(name: str, size: int = 64) -> tuple[GrayImage, GrayImage]:
    """Deterministic in-repo test image pairs (no redistributed photos)."""
    if size < 3:
        raise ImageError(f"synthetic images need size >= 3, got {size}")
    yy, xx = np.mgrid[0:size, 0:size]
    if name == "gradients":
        a = (xx * 255) // (size - 1)
        b = (yy * 255) // (size - 1)
    elif name == "checker":
        a = np.where(((xx // 8) + (yy // 8)) % 2 == 0, 52, 204)
        b = ((xx + yy) * 255) // (2 * size - 2)
    else:
        raise ImageError(f"unknown synthetic pair {name!r}; "
                         f"choices: {', '.join(SYNTHETIC_PAIRS)}")
    return (GrayImage(size, size, a.astype(np.uint8)),
            GrayImage(size, size, b.astype(np.uint8)))
