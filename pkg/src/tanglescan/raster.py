"""Image containers, PPM/PNG file I/O, and the shared convolution primitive.

Images are thin frozen wrappers around read-only numpy arrays:

* ``RgbImage``  -- (h, w, 3) uint8
* ``GrayImage`` -- (h, w) uint8, or float64 for raw convolution responses
* ``BinaryImage`` -- (h, w) bool, True = foreground

Coordinates are (x, y) with x growing right and y growing down; arrays are
indexed [y, x].
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from pathlib import Path
from typing import TYPE_CHECKING, Sequence

import numpy as np
from PIL import Image as PILImage
from PIL import ImageDraw, ImageFont
from scipy import ndimage

from .errors import (
    CorruptDataError,
    FileNotFoundInputError,
    InputError,
    UnsupportedFormatError,
)

if TYPE_CHECKING:
    from .verdict import Tangle

_PNG_MAGIC = b"\x89PNG\r\n\x1a\n"

CROSSHAIR_ARM = 6
CROSSHAIR_COLOR = (255, 255, 0)


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr = np.ascontiguousarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RgbImage:
    """8-bit color raster, row-major (r, g, b) triples."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be >= 1")
        if self.data.shape != (self.height, self.width, 3):
            raise ValueError(
                f"data shape {self.data.shape} != {(self.height, self.width, 3)}"
            )
        if self.data.dtype != np.uint8:
            raise ValueError("RgbImage data must be uint8")
        object.__setattr__(self, "data", _readonly(self.data))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "RgbImage":
        arr = np.asarray(arr, dtype=np.uint8)
        return cls(arr.shape[1], arr.shape[0], arr)

    def pixel(self, x: int, y: int) -> tuple[int, int, int]:
        r, g, b = self.data[y, x]
        return int(r), int(g), int(b)


@dataclass(frozen=True)
class GrayImage:
    """Single-channel raster.

    uint8 for ordinary images; float64 for signed convolution responses that
    have not been normalized yet.
    """

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ValueError("image dimensions must be >= 1")
        if self.data.shape != (self.height, self.width):
            raise ValueError(
                f"data shape {self.data.shape} != {(self.height, self.width)}"
            )
        if self.data.dtype not in (np.uint8, np.float64):
            raise ValueError("GrayImage data must be uint8 or float64")
        object.__setattr__(self, "data", _readonly(self.data))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "GrayImage":
        arr = np.asarray(arr)
        if arr.dtype != np.uint8:
            arr = arr.astype(np.float64)
        return cls(arr.shape[1], arr.shape[0], arr)

    def to_uint8(self) -> "GrayImage":
        """Clamp to 0-255 and round; identity if already uint8."""
        if self.data.dtype == np.uint8:
            return self
        clamped = np.clip(np.floor(self.data + 0.5), 0, 255).astype(np.uint8)
        return GrayImage(self.width, self.height, clamped)


@dataclass(frozen=True)
class BinaryImage:
    """Boolean raster; True marks foreground (edge) pixels."""

    width: int
    height: int
    data: np.ndarray

    def __post_init__(self):
        if self.data.shape != (self.height, self.width):
            raise ValueError(
                f"data shape {self.data.shape} != {(self.height, self.width)}"
            )
        if self.data.dtype != np.bool_:
            raise ValueError("BinaryImage data must be bool")
        object.__setattr__(self, "data", _readonly(self.data))

    @classmethod
    def from_array(cls, arr: np.ndarray) -> "BinaryImage":
        arr = np.asarray(arr, dtype=bool)
        return cls(arr.shape[1], arr.shape[0], arr)


@dataclass(frozen=True)
class Kernel:
    """Square odd-sized convolution mask."""

    size: int
    coefficients: np.ndarray

    def __post_init__(self):
        if self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"kernel size must be odd and >= 1, got {self.size}")
        coeffs = np.asarray(self.coefficients, dtype=np.float64)
        if coeffs.shape != (self.size, self.size):
            raise ValueError(f"coefficients shape {coeffs.shape} != square of size {self.size}")
        object.__setattr__(self, "coefficients", _readonly(coeffs))

    @classmethod
    def from_array(cls, arr) -> "Kernel":
        arr = np.asarray(arr, dtype=np.float64)
        return cls(arr.shape[0], arr)


# --- file I/O ---

def _ppm_tokens(buf: bytes, count: int) -> tuple[list[bytes], int]:
    """Read `count` whitespace-separated header tokens, skipping # comments.

    Returns the tokens and the offset of the byte right after the single
    whitespace that terminates the last token.
    """
    tokens = []
    pos = 0
    while len(tokens) < count:
        while pos < len(buf) and buf[pos : pos + 1].isspace():
            pos += 1
        if pos < len(buf) and buf[pos : pos + 1] == b"#":
            while pos < len(buf) and buf[pos : pos + 1] not in (b"\n", b"\r"):
                pos += 1
            continue
        start = pos
        while pos < len(buf) and not buf[pos : pos + 1].isspace():
            pos += 1
        if pos == start:
            raise CorruptDataError("truncated PPM header")
        tokens.append(buf[start:pos])
        pos += 1  # single whitespace after the token
    return tokens, pos


def _decode_ppm(buf: bytes) -> RgbImage:
    try:
        (magic, w_tok, h_tok, maxval_tok), offset = _ppm_tokens(buf, 4)
        width, height, maxval = int(w_tok), int(h_tok), int(maxval_tok)
    except (ValueError, CorruptDataError) as exc:
        raise CorruptDataError(f"bad PPM header: {exc}") from exc
    if magic != b"P6":
        raise UnsupportedFormatError(f"not a binary PPM: magic {magic!r}")
    if maxval != 255:
        raise UnsupportedFormatError(f"only maxval 255 PPM supported, got {maxval}")
    if width < 1 or height < 1:
        raise CorruptDataError(f"bad PPM dimensions {width}x{height}")
    need = width * height * 3
    raw = buf[offset : offset + need]
    if len(raw) < need:
        raise CorruptDataError(
            f"PPM payload truncated: expected {need} bytes, found {len(raw)}"
        )
    arr = np.frombuffer(raw, dtype=np.uint8).reshape(height, width, 3)
    return RgbImage(width, height, arr)


def encode_ppm(image: RgbImage) -> bytes:
    header = f"P6\n{image.width} {image.height}\n255\n".encode("ascii")
    return header + image.data.tobytes()


def _decode_png(buf: bytes) -> RgbImage:
    try:
        pil = PILImage.open(io.BytesIO(buf))
        pil.load()
    except Exception as exc:
        raise CorruptDataError(f"bad PNG data: {exc}") from exc
    if pil.mode == "RGBA":
        pil = pil.convert("RGB")  # drop alpha
    if pil.mode != "RGB":
        raise UnsupportedFormatError(f"only 8-bit RGB/RGBA PNG supported, got mode {pil.mode}")
    return RgbImage.from_array(np.asarray(pil))


def decode_image(buf: bytes, origin: str = "buffer") -> RgbImage:
    """Decode PPM (P6) or PNG bytes, sniffing the magic."""
    if buf[:2] == b"P6":
        return _decode_ppm(buf)
    if buf[: len(_PNG_MAGIC)] == _PNG_MAGIC:
        return _decode_png(buf)
    raise UnsupportedFormatError(f"unrecognized image format: {origin}")


def encode_image(image: RgbImage, fmt: str = "ppm") -> bytes:
    if fmt == "png":
        out = io.BytesIO()
        PILImage.fromarray(np.asarray(image.data)).save(out, format="PNG")
        return out.getvalue()
    return encode_ppm(image)


def load_image(path: str | Path) -> RgbImage:
    """Decode a binary PPM (P6) or 8-bit RGB/RGBA PNG file."""
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundInputError(f"no such image file: {path}")
    return decode_image(path.read_bytes(), origin=str(path))


def save_image(image: RgbImage, path: str | Path) -> None:
    """Write PPM (bit-exact) or PNG, chosen by file extension."""
    path = Path(path)
    fmt = "png" if path.suffix.lower() == ".png" else "ppm"
    try:
        path.write_bytes(encode_image(image, fmt))
    except OSError as exc:
        raise InputError(f"cannot write image to {path}: {exc}") from exc


def annotate(image: RgbImage, tangles: Sequence["Tangle"]) -> RgbImage:
    """Return a copy with a cross-hair and confidence label at each tangle."""
    for t in tangles:
        x, y = int(round(t.position[0])), int(round(t.position[1]))
        if not (0 <= x < image.width and 0 <= y < image.height):
            raise InputError(f"tangle position {t.position} outside {image.width}x{image.height} image")
    if not tangles:
        return image
    out = np.array(image.data)
    for t in tangles:
        x, y = int(round(t.position[0])), int(round(t.position[1]))
        x0, x1 = max(0, x - CROSSHAIR_ARM), min(image.width - 1, x + CROSSHAIR_ARM)
        y0, y1 = max(0, y - CROSSHAIR_ARM), min(image.height - 1, y + CROSSHAIR_ARM)
        out[y, x0 : x1 + 1] = CROSSHAIR_COLOR
        out[y0 : y1 + 1, x] = CROSSHAIR_COLOR
    pil = PILImage.fromarray(out)
    draw = ImageDraw.Draw(pil)
    font = ImageFont.load_default()
    for t in tangles:
        x, y = int(round(t.position[0])), int(round(t.position[1]))
        draw.text((x + CROSSHAIR_ARM + 2, y + 2), f"{t.confidence:.2f}",
                  fill=CROSSHAIR_COLOR, font=font)
    return RgbImage.from_array(np.asarray(pil))


def save_annotated(image: RgbImage, tangles: Sequence["Tangle"], path: str | Path) -> None:
    """Write `image` with tangle markers to `path` (empty list = verbatim copy)."""
    save_image(annotate(image, tangles), path)


# --- pixel-space operations ---

GRAY_WEIGHTS = (0.299, 0.587, 0.114)


def to_grayscale(image: RgbImage) -> GrayImage:
    """Luma conversion: round(0.299 r + 0.587 g + 0.114 b) per pixel."""
    rgb = image.data.astype(np.float64)
    luma = rgb[:, :, 0] * GRAY_WEIGHTS[0] + rgb[:, :, 1] * GRAY_WEIGHTS[1] + rgb[:, :, 2] * GRAY_WEIGHTS[2]
    return GrayImage(image.width, image.height, np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8))


def correlate2d(data: np.ndarray, kernel: Kernel) -> np.ndarray:
    """Correlate (no kernel flip) with replicate-edge borders; float64 output."""
    return ndimage.correlate(
        np.asarray(data, dtype=np.float64), np.asarray(kernel.coefficients), mode="nearest"
    )


def convolve(image: GrayImage, kernel: Kernel) -> GrayImage:
    """Apply `kernel` over the image, replicating edge pixels at the border.

    The response is kept as signed float64; directional kernels produce
    negative values that later stages rectify and normalize.
    """
    return GrayImage(image.width, image.height, correlate2d(image.data, kernel))
