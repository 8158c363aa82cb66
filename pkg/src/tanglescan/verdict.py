"""Over-wire decisions and cross-mask aggregation into final tangles.

At an intersection, the patch whose midpoint mean sits closest is decided
to belong to the wire passing over (its wire runs straight through the
crossing; occluded wires stop short, pushing their patch centroids away).
Each of the eight mask directions and each overlapping window may report
the same physical tangle; spatial single-linkage clustering merges them
and the highest-confidence decision wins per cluster.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .curvefit import IntersectionPoint, PatchAnalysis
from .edgedetect import CompassDirection
from .scanner import WindowRect

TIE_EPSILON_PX = 0.5
MERGE_RADIUS_PX = 10.0


@dataclass(frozen=True)
class TangleCandidate:
    """One window's decision for one intersection, under one mask direction."""

    position: tuple[float, float]
    over_patch: int
    under_patches: tuple[int, ...]
    d_over: float
    confidence: float
    direction: CompassDirection
    window: WindowRect
    patch_pair: tuple[int, int]
    over_pixels: tuple[tuple[int, int], ...] = ()

    def sort_key(self):
        return (
            self.direction.order,
            self.window.y0,
            self.window.x0,
            self.patch_pair,
            self.position,
        )


@dataclass(frozen=True)
class Tangle:
    """Final merged detection."""

    position: tuple[float, float]
    direction: CompassDirection
    window: WindowRect
    over_patch: int
    confidence: float
    contributing_candidates: int
    over_pixels: tuple[tuple[int, int], ...] = ()


def decide_window(
    analyses: list[PatchAnalysis],
    ip: IntersectionPoint,
    rect: WindowRect,
    direction: CompassDirection = CompassDirection.N,
    tie_epsilon: float = TIE_EPSILON_PX,
    patch_pixels: dict[int, tuple[tuple[int, int], ...]] | None = None,
) -> TangleCandidate | None:
    """Pick the over-wire patch for one intersection, or None on a tie.

    d_j is the distance from patch j's midpoint mean (window coordinates,
    offset into the image) to the intersection; the minimum marks the
    over-wire and scales the confidence (d_w - d_min) / d_w. When the two
    smallest d_j are within `tie_epsilon` the geometry cannot support an
    over/under call and no candidate is emitted.
    """
    if len(analyses) < 2:
        return None
    dists = []
    for a in analyses:
        mx, my = a.midpoints.mean
        d = math.dist((mx + rect.x0, my + rect.y0), ip.position)
        dists.append((d, a.patch_id))
    dists.sort()
    if dists[1][0] - dists[0][0] <= tie_epsilon:
        return None
    d_min, over_id = dists[0]
    confidence = (rect.diagonal - d_min) / rect.diagonal
    pixels = ()
    if patch_pixels is not None:
        pixels = patch_pixels.get(over_id, ())
    return TangleCandidate(
        position=ip.position,
        over_patch=over_id,
        under_patches=tuple(pid for _, pid in dists[1:]),
        d_over=d_min,
        confidence=confidence,
        direction=direction,
        window=rect,
        patch_pair=ip.patch_pair,
        over_pixels=pixels,
    )


def _clusters(cands: list[TangleCandidate], merge_radius: float) -> list[list[TangleCandidate]]:
    """Single-linkage clustering on candidate positions."""
    n = len(cands)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if math.dist(cands[i].position, cands[j].position) <= merge_radius:
                parent[find(i)] = find(j)

    groups: dict[int, list[TangleCandidate]] = {}
    for i, c in enumerate(cands):
        groups.setdefault(find(i), []).append(c)
    return list(groups.values())


def merge_candidates(
    cands: list[TangleCandidate], merge_radius: float = MERGE_RADIUS_PX
) -> list[Tangle]:
    """Cluster candidates of one physical tangle and keep the best decision.

    The cluster representative is its highest-confidence member (ties fall
    back to compass declaration order, then window raster order), carrying
    both its position and over-wire call. Output is sorted by descending
    confidence. Input order never matters: candidates are canonicalized
    before clustering.
    """
    ordered = sorted(cands, key=TangleCandidate.sort_key)
    tangles = []
    for group in _clusters(ordered, merge_radius):
        best = min(group, key=lambda c: (-c.confidence,) + c.sort_key())
        tangles.append(
            Tangle(
                position=best.position,
                direction=best.direction,
                window=best.window,
                over_patch=best.over_patch,
                confidence=best.confidence,
                contributing_candidates=len(group),
                over_pixels=best.over_pixels,
            )
        )
    tangles.sort(key=lambda t: (-t.confidence, t.direction.order, t.window.y0, t.window.x0))
    return tangles
