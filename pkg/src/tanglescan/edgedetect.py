"""Directional edge maps: Robinson compass masks + Otsu thresholding.

One binary edge map is produced per compass direction; the rest of the
pipeline runs once per map and the per-direction decisions are merged at
the very end.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateHistogramError
from .raster import BinaryImage, GrayImage, Kernel, correlate2d


class CompassDirection(Enum):
    N = "N"
    S = "S"
    E = "E"
    W = "W"
    NE = "NE"
    NW = "NW"
    SE = "SE"
    SW = "SW"

    @property
    def order(self) -> int:
        """Declaration order; the deterministic tie-break rank."""
        return list(CompassDirection).index(self)


# Border ring of a 3x3 mask enumerated clockwise from the top-left corner.
_RING = [(0, 0), (0, 1), (0, 2), (1, 2), (2, 2), (2, 1), (2, 0), (1, 0)]

_NORTH = np.array([[-1, -2, -1], [0, 0, 0], [1, 2, 1]], dtype=np.float64)

# Rotating the ring one step per 45 degrees walks the compass in this order.
_ROTATION_ORDER = [
    CompassDirection.N,
    CompassDirection.NW,
    CompassDirection.W,
    CompassDirection.SW,
    CompassDirection.S,
    CompassDirection.SE,
    CompassDirection.E,
    CompassDirection.NE,
]


def robinson_masks() -> dict[CompassDirection, Kernel]:
    """The eight 3x3 compass masks, generated by 45-degree ring rotations of N.

    Every mask sums to zero and the eight share one coefficient multiset
    (0, +-1, +-2).
    """
    ring_values = [_NORTH[r, c] for r, c in _RING]
    masks = {}
    for step, direction in enumerate(_ROTATION_ORDER):
        rotated = ring_values[step:] + ring_values[:step]
        m = np.zeros((3, 3), dtype=np.float64)
        for (r, c), v in zip(_RING, rotated):
            m[r, c] = v
        masks[direction] = Kernel(3, m)
    return masks


_MASKS = robinson_masks()


def edge_response(image: GrayImage, direction: CompassDirection) -> GrayImage:
    """Rectified, rescaled response of one compass mask.

    The mask is correlated (not flipped), the signed response is rectified
    by absolute value, then linearly rescaled so the strongest response maps
    to exactly 255 (an all-zero response stays all-zero).
    """
    raw = np.abs(correlate2d(image.data, _MASKS[direction]))
    peak = raw.max()
    if peak == 0:
        scaled = raw
    else:
        scaled = raw * (255.0 / peak)
    return GrayImage(image.width, image.height, np.floor(scaled + 0.5).astype(np.uint8))


@dataclass(frozen=True)
class Histogram:
    """256-bin intensity histogram."""

    counts: np.ndarray
    total: int

    def probabilities(self) -> np.ndarray:
        return self.counts / self.total


def histogram(image: GrayImage) -> Histogram:
    if image.data.dtype != np.uint8:
        raise ValueError("histogram needs a 0-255 uint8 image; normalize the response first")
    counts = np.bincount(image.data.ravel(), minlength=256)
    return Histogram(counts, int(counts.sum()))


@dataclass(frozen=True)
class OtsuResult:
    threshold: int
    between_class_variance: float


def otsu_curves(hist: Histogram) -> tuple[np.ndarray, np.ndarray, float]:
    """Within- and between-class variance for every candidate threshold 1..255.

    Returns (sigma_within, sigma_between, sigma_total), each variance array
    indexed so entry k corresponds to threshold T = k + 1. Pixels with
    intensity >= T form the upper (foreground) class; an empty class
    contributes zero.
    """
    idx = np.arange(256, dtype=np.float64)
    p = hist.probabilities()
    cum_p = np.cumsum(p)
    cum_ip = np.cumsum(idx * p)
    cum_i2p = np.cumsum(idx * idx * p)
    mean_total = cum_ip[-1]
    var_total = float(cum_i2p[-1] - mean_total**2)

    t = np.arange(1, 256)
    n_lo = cum_p[t - 1]
    n_hi = 1.0 - n_lo
    s_lo = cum_ip[t - 1]
    s_hi = mean_total - s_lo
    q_lo = cum_i2p[t - 1]
    q_hi = cum_i2p[-1] - q_lo

    # n * sigma^2 of a class = sum(i^2 p) - (sum(i p))^2 / n, zero when empty
    with np.errstate(divide="ignore", invalid="ignore"):
        lo_term = np.where(n_lo > 0, q_lo - np.divide(s_lo**2, n_lo, where=n_lo > 0), 0.0)
        hi_term = np.where(n_hi > 0, q_hi - np.divide(s_hi**2, n_hi, where=n_hi > 0), 0.0)
    sigma_within = lo_term + hi_term
    sigma_between = var_total - sigma_within
    return sigma_within, sigma_between, var_total


def otsu_threshold(image: GrayImage) -> tuple[OtsuResult, BinaryImage]:
    """Pick the threshold maximizing between-class variance; binarize at it.

    Scans every candidate T in 1..255, ties broken toward the smallest T.
    Foreground is intensity >= T (edges sit above the threshold).
    Raises DegenerateHistogramError when the image has a single intensity.
    """
    hist = histogram(image)
    if np.count_nonzero(hist.counts) < 2:
        raise DegenerateHistogramError(
            "all pixels share one intensity; no threshold separates two classes"
        )
    _, sigma_between, _ = otsu_curves(hist)
    best = int(np.argmax(sigma_between))
    threshold = best + 1
    result = OtsuResult(threshold, float(sigma_between[best]))
    binary = BinaryImage(image.width, image.height, image.data >= threshold)
    return result, binary
