"""Synthetic tangle scenes with exact ground truth.

Wires are thick polylines rendered without anti-aliasing in draw order, so
a later wire occludes earlier ones exactly where their bodies overlap; the
occlusion gap in the earlier wire's edges is what the detector keys on.
Ground truth records every centerline crossing with the over-wire (the
later-drawn one) plus a per-pixel map of the topmost wire, used to score
over-wire calls.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .raster import RgbImage, _readonly
from .scanner import WindowRect


@dataclass(frozen=True)
class WireSpec:
    """One wire: polyline control points, stroke thickness, color.

    cap_style "round" strokes stadium-shaped segments (smooth joints);
    "butt" cuts segment ends square, which keeps a short wire's two side
    edges from curling into each other in the edge maps.
    """

    points: tuple[tuple[float, float], ...]
    thickness: float
    color: tuple[int, int, int]
    cap_style: str = "round"


@dataclass(frozen=True)
class SceneSpec:
    width: int
    height: int
    wires: tuple[WireSpec, ...] = ()
    seed: int = 0
    noise_sigma: float = 0.0
    background: tuple[int, int, int] = (190, 190, 190)
    background_style: str = "flat"  # flat | texture


@dataclass(frozen=True)
class Crossing:
    position: tuple[float, float]
    over_wire: int
    under_wire: int


@dataclass(frozen=True)
class GroundTruth:
    """Crossings plus the rendered wire-occupancy labels.

    `wire_labels` is (h, w) int: topmost wire index per pixel, -1 for
    background. It is rendering metadata, not serialized to truth JSON.
    """

    width: int
    height: int
    crossings: tuple[Crossing, ...]
    wire_labels: np.ndarray | None = field(default=None, compare=False)

    def windows_with_crossing(self, windows: list[WindowRect]) -> list[bool]:
        return [
            any(rect.contains(*c.position) for c in self.crossings) for rect in windows
        ]


def _validate(spec: SceneSpec) -> None:
    if spec.width < 1 or spec.height < 1:
        raise InputError("scene dimensions must be >= 1")
    if spec.background_style not in ("flat", "texture"):
        raise InputError(f"unknown background style {spec.background_style!r}")
    for i, wire in enumerate(spec.wires):
        if wire.thickness <= 0:
            raise InputError(f"wire {i} has non-positive thickness {wire.thickness}")
        if len(wire.points) < 2:
            raise InputError(f"wire {i} needs at least 2 control points")
        if wire.cap_style not in ("round", "butt"):
            raise InputError(f"wire {i} has unknown cap style {wire.cap_style!r}")
        for x, y in wire.points:
            if not (0 <= x < spec.width and 0 <= y < spec.height):
                raise InputError(
                    f"wire {i} control point ({x}, {y}) outside {spec.width}x{spec.height} scene"
                )


def _stamp_segment(
    mask: np.ndarray,
    p: tuple[float, float],
    q: tuple[float, float],
    radius: float,
    butt: bool = False,
) -> None:
    """Mark every pixel within `radius` of segment pq (crisp, no AA)."""
    h, w = mask.shape
    x_lo = max(0, int(math.floor(min(p[0], q[0]) - radius)))
    x_hi = min(w - 1, int(math.ceil(max(p[0], q[0]) + radius)))
    y_lo = max(0, int(math.floor(min(p[1], q[1]) - radius)))
    y_hi = min(h - 1, int(math.ceil(max(p[1], q[1]) + radius)))
    if x_lo > x_hi or y_lo > y_hi:
        return
    xs = np.arange(x_lo, x_hi + 1, dtype=np.float64)
    ys = np.arange(y_lo, y_hi + 1, dtype=np.float64)
    gx, gy = np.meshgrid(xs, ys)
    dx, dy = q[0] - p[0], q[1] - p[1]
    seg_len2 = dx * dx + dy * dy
    if seg_len2 == 0:
        dist2 = (gx - p[0]) ** 2 + (gy - p[1]) ** 2
        hit = dist2 <= radius * radius
    else:
        t_raw = ((gx - p[0]) * dx + (gy - p[1]) * dy) / seg_len2
        t = np.clip(t_raw, 0.0, 1.0)
        dist2 = (gx - p[0] - t * dx) ** 2 + (gy - p[1] - t * dy) ** 2
        hit = dist2 <= radius * radius
        if butt:
            hit &= (t_raw >= 0.0) & (t_raw <= 1.0)
    mask[y_lo : y_hi + 1, x_lo : x_hi + 1] |= hit


def _wire_mask(wire: WireSpec, width: int, height: int) -> np.ndarray:
    mask = np.zeros((height, width), dtype=bool)
    for p, q in zip(wire.points[:-1], wire.points[1:]):
        _stamp_segment(mask, p, q, wire.thickness / 2.0, butt=wire.cap_style == "butt")
    return mask


def _segment_crossing(p1, p2, p3, p4) -> tuple[float, float] | None:
    d1 = (p2[0] - p1[0], p2[1] - p1[1])
    d2 = (p4[0] - p3[0], p4[1] - p3[1])
    denom = d1[0] * d2[1] - d1[1] * d2[0]
    if abs(denom) < 1e-12:
        return None
    rx, ry = p3[0] - p1[0], p3[1] - p1[1]
    t = (rx * d2[1] - ry * d2[0]) / denom
    u = (rx * d1[1] - ry * d1[0]) / denom
    if 0.0 <= t <= 1.0 and 0.0 <= u <= 1.0:
        return (p1[0] + t * d1[0], p1[1] + t * d1[1])
    return None


def _centerline_crossings(spec: SceneSpec) -> list[Crossing]:
    crossings: list[Crossing] = []
    for i in range(len(spec.wires)):
        for j in range(i + 1, len(spec.wires)):
            a, b = spec.wires[i], spec.wires[j]
            for p1, p2 in zip(a.points[:-1], a.points[1:]):
                for p3, p4 in zip(b.points[:-1], b.points[1:]):
                    pt = _segment_crossing(p1, p2, p3, p4)
                    if pt is None:
                        continue
                    if any(math.dist(pt, c.position) < 1.0 for c in crossings):
                        continue  # polyline joints can double-report
                    crossings.append(Crossing(pt, over_wire=j, under_wire=i))
    return crossings


def generate_scene(spec: SceneSpec) -> tuple[RgbImage, GroundTruth]:
    """Render the scene and its exact ground truth, deterministic in the seed."""
    _validate(spec)
    rng = np.random.default_rng(spec.seed)
    canvas = np.empty((spec.height, spec.width, 3), dtype=np.float64)
    canvas[:] = spec.background
    if spec.background_style == "texture":
        canvas += rng.uniform(-18.0, 18.0, size=(spec.height, spec.width, 1))

    labels = np.full((spec.height, spec.width), -1, dtype=np.int32)
    for idx, wire in enumerate(spec.wires):
        mask = _wire_mask(wire, spec.width, spec.height)
        canvas[mask] = wire.color
        labels[mask] = idx

    if spec.noise_sigma > 0:
        canvas += rng.normal(0.0, spec.noise_sigma, size=canvas.shape)

    pixels = np.clip(np.floor(canvas + 0.5), 0, 255).astype(np.uint8)
    image = RgbImage(spec.width, spec.height, pixels)
    truth = GroundTruth(
        spec.width, spec.height, tuple(_centerline_crossings(spec)), _readonly(labels)
    )
    return image, truth


# --- JSON wire formats (scene spec in, ground truth out) ---

def spec_from_dict(d: dict, seed: int | None = None) -> SceneSpec:
    try:
        wires = tuple(
            WireSpec(
                points=tuple((float(x), float(y)) for x, y in w["points"]),
                thickness=float(w["thickness"]),
                color=tuple(int(c) for c in w["color"]),
                cap_style=str(w.get("cap_style", "round")),
            )
            for w in d.get("wires", [])
        )
        bg = d.get("background", {})
        return SceneSpec(
            width=int(d["width"]),
            height=int(d["height"]),
            wires=wires,
            seed=int(seed if seed is not None else d.get("seed", 0)),
            noise_sigma=float(d.get("noise_sigma", 0.0)),
            background=tuple(int(c) for c in bg.get("color", (190, 190, 190))),
            background_style=str(bg.get("style", "flat")),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad scene spec: {exc}") from exc


def truth_to_dict(truth: GroundTruth) -> dict:
    return {
        "width": truth.width,
        "height": truth.height,
        "crossings": [
            {
                "x": float(c.position[0]),
                "y": float(c.position[1]),
                "over": c.over_wire,
                "under": c.under_wire,
            }
            for c in truth.crossings
        ],
    }


def truth_from_dict(d: dict) -> GroundTruth:
    try:
        crossings = tuple(
            Crossing((float(c["x"]), float(c["y"])), int(c["over"]), int(c["under"]))
            for c in d.get("crossings", [])
        )
        return GroundTruth(int(d["width"]), int(d["height"]), crossings, None)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad ground-truth JSON: {exc}") from exc
