"""Color isolation of the wire of interest and Gaussian smoothing.

Both steps run before edge detection: isolation zeroes every pixel that is
not close to the wire's color, smoothing suppresses noise that the
directional derivative kernels would otherwise amplify.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .raster import GrayImage, Kernel, RgbImage, correlate2d


@dataclass(frozen=True)
class ColorTarget:
    """Wire color to keep, with a Euclidean RGB distance tolerance."""

    r: int
    g: int
    b: int
    tolerance: float = 60.0

    def __post_init__(self):
        for v in (self.r, self.g, self.b):
            if not 0 <= v <= 255:
                raise ValueError(f"color component {v} outside 0-255")
        if self.tolerance < 0:
            raise ValueError("tolerance must be >= 0")


@dataclass(frozen=True)
class BlurConfig:
    """Gaussian kernel dimensions and standard deviation (pixels)."""

    size: int = 5
    sigma: float = 1.0

    def __post_init__(self):
        if self.size < 1 or self.size % 2 == 0:
            raise ValueError(f"blur size must be odd and >= 1, got {self.size}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be positive, got {self.sigma}")


# Presets for the two capture environments; outdoor scenes need heavier
# smoothing than indoor ones.
INDOOR_BLUR = BlurConfig(size=5, sigma=1.0)
OUTDOOR_BLUR = BlurConfig(size=9, sigma=2.0)


def isolate_color(image: RgbImage, target: ColorTarget | None) -> RgbImage:
    """Keep pixels within `target.tolerance` of the target color, zero the rest.

    `target=None` means no wire color was requested; the image passes through
    unchanged.
    """
    if target is None:
        return image
    rgb = image.data.astype(np.float64)
    dist2 = (
        (rgb[:, :, 0] - target.r) ** 2
        + (rgb[:, :, 1] - target.g) ** 2
        + (rgb[:, :, 2] - target.b) ** 2
    )
    keep = dist2 <= target.tolerance**2
    out = np.where(keep[:, :, None], image.data, 0).astype(np.uint8)
    return RgbImage(image.width, image.height, out)


def gaussian_kernel(config: BlurConfig) -> Kernel:
    """Kernel sampled from the 2-D Gaussian exp(-(x²+y²)/2σ²), normalized to sum 1.

    (x, y) are signed offsets from the kernel center; the common 1/2πσ²
    factor cancels in the normalization.
    """
    half = config.size // 2
    offsets = np.arange(-half, half + 1, dtype=np.float64)
    xx, yy = np.meshgrid(offsets, offsets)
    g = np.exp(-(xx**2 + yy**2) / (2.0 * config.sigma**2))
    g /= g.sum()
    return Kernel(config.size, g)


def _blur_channel(channel: np.ndarray, kernel: Kernel) -> np.ndarray:
    blurred = correlate2d(channel, kernel)
    return np.clip(np.floor(blurred + 0.5), 0, 255).astype(np.uint8)


def gaussian_blur(image: RgbImage | GrayImage, config: BlurConfig) -> RgbImage | GrayImage:
    """Blur with gaussian_kernel(config); per channel for color images."""
    kernel = gaussian_kernel(config)
    if isinstance(image, RgbImage):
        out = np.empty_like(image.data)
        for c in range(3):
            out[:, :, c] = _blur_channel(image.data[:, :, c], kernel)
        return RgbImage(image.width, image.height, out)
    return GrayImage(image.width, image.height, _blur_channel(image.data, kernel))


def blur_preset(name: str) -> BlurConfig:
    presets = {"indoor": INDOOR_BLUR, "outdoor": OUTDOOR_BLUR}
    if name not in presets:
        raise ValueError(f"unknown blur preset {name!r} (use {sorted(presets)})")
    return presets[name]


def euclidean_distance(a: tuple[int, int, int], b: tuple[int, int, int]) -> float:
    return math.dist(a, b)
