"""Sliding-window sweep over a binary edge map and per-window patch capture.

Windows walk the image in raster order with a configurable stride; extra
placements flush to the right/bottom edges guarantee full coverage. Inside
each window, 8-connected components of edge pixels become patches.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .raster import BinaryImage

_EIGHT_CONN = np.ones((3, 3), dtype=int)

DEFAULT_WINDOW = 64
DEFAULT_STRIDE = 32
DEFAULT_MIN_PATCH_PIXELS = 8


@dataclass(frozen=True)
class WindowRect:
    """Axis-aligned window; (x0, y0) top-left, fully inside the image."""

    x0: int
    y0: int
    w: int
    h: int

    @property
    def diagonal(self) -> float:
        return math.hypot(self.w, self.h)

    def contains(self, x: float, y: float) -> bool:
        return self.x0 <= x <= self.x0 + self.w and self.y0 <= y <= self.y0 + self.h

    def as_tuple(self) -> tuple[int, int, int, int]:
        return (self.x0, self.y0, self.w, self.h)


@dataclass(frozen=True)
class Patch:
    """One 8-connected blob of edge pixels inside a window.

    Pixel coordinates are window-local (x, y).
    """

    id: int
    pixels: tuple[tuple[int, int], ...]
    bbox: tuple[int, int, int, int]  # x_min, y_min, x_max, y_max

    @property
    def size(self) -> int:
        return len(self.pixels)


def _axis_offsets(extent: int, size: int, stride: int) -> list[int]:
    size = min(size, extent)
    offsets = []
    pos = 0
    while pos + size <= extent:
        offsets.append(pos)
        pos += stride
    if not offsets:
        offsets = [0]
    if offsets[-1] + size < extent:
        offsets.append(extent - size)
    return offsets


def windows(image_w: int, image_h: int, w: int, h: int, stride: int) -> list[WindowRect]:
    """Raster-ordered window placements covering every pixel.

    Placements land on the stride grid; when the grid leaves a right or
    bottom margin uncovered, one extra placement flush with that edge is
    appended. Windows larger than the image are clamped to it.
    """
    if w < 1 or h < 1 or stride < 1:
        raise ValueError("window dimensions and stride must be >= 1")
    xs = _axis_offsets(image_w, w, stride)
    ys = _axis_offsets(image_h, h, stride)
    w_eff = min(w, image_w)
    h_eff = min(h, image_h)
    return [WindowRect(x, y, w_eff, h_eff) for y in ys for x in xs]


def extract_patches(
    edges: BinaryImage, rect: WindowRect, min_patch_pixels: int = DEFAULT_MIN_PATCH_PIXELS
) -> list[Patch]:
    """Label the window's 8-connected edge blobs, dropping tiny ones.

    Patches are ordered by their first foreground pixel in raster order and
    carry window-local coordinates.
    """
    if rect.x0 < 0 or rect.y0 < 0 or rect.x0 + rect.w > edges.width or rect.y0 + rect.h > edges.height:
        raise ValueError(f"window {rect} outside {edges.width}x{edges.height} image")
    view = edges.data[rect.y0 : rect.y0 + rect.h, rect.x0 : rect.x0 + rect.w]
    labels, count = ndimage.label(view, structure=_EIGHT_CONN)
    if count == 0:
        return []
    patches = []
    order = []
    for label in range(1, count + 1):
        ys, xs = np.nonzero(labels == label)
        if len(xs) < min_patch_pixels:
            continue
        # raster rank of the component's first pixel
        first = np.lexsort((xs, ys))[0]
        order.append((int(ys[first]), int(xs[first]), xs, ys))
    order.sort(key=lambda item: (item[0], item[1]))
    for pid, (_, _, xs, ys) in enumerate(order):
        coords = sorted(zip(xs.tolist(), ys.tolist()), key=lambda p: (p[1], p[0]))
        bbox = (int(xs.min()), int(ys.min()), int(xs.max()), int(ys.max()))
        patches.append(Patch(pid, tuple(coords), bbox))
    return patches


def patch_mask(patch: Patch, rect: WindowRect) -> BinaryImage:
    """Window-sized binary image containing only this patch's pixels."""
    data = np.zeros((rect.h, rect.w), dtype=bool)
    for x, y in patch.pixels:
        data[y, x] = True
    return BinaryImage(rect.w, rect.h, data)
