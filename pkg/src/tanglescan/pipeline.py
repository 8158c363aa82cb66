"""End-to-end detection driver and the detection JSON wire format.

Stages: optional color isolation -> Gaussian blur -> grayscale -> for each
of the eight compass masks {edge response -> Otsu -> per window: patches ->
contours -> midpoints -> polynomial fit -> intersection -> over-wire
decision} -> spatial merge of all candidates.

The eight per-direction passes are independent; `workers` > 1 fans them
out across threads. Results are gathered in compass declaration order, so
sequential and concurrent runs produce identical output.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from itertools import combinations

from .config import PipelineConfig
from .curvefit import PatchAnalysis, analyze_patch, intersect
from .edgedetect import CompassDirection, edge_response, otsu_threshold
from .errors import DegenerateHistogramError, InputError, UnfittablePatchError
from .preprocess import gaussian_blur, isolate_color
from .raster import BinaryImage, GrayImage, RgbImage, to_grayscale
from .scanner import WindowRect, extract_patches, patch_mask, windows
from .tracer import trace_contour
from .verdict import Tangle, TangleCandidate, decide_window, merge_candidates


def window_candidates(
    edges: BinaryImage,
    rect: WindowRect,
    direction: CompassDirection,
    config: PipelineConfig,
) -> list[TangleCandidate]:
    """Analyze one window of one edge map; needs >= 2 patches to say anything."""
    patches = extract_patches(edges, rect, config.min_patch_pixels)
    if len(patches) < 2:
        return []
    analyses: list[PatchAnalysis] = []
    pixmap: dict[int, tuple[tuple[int, int], ...]] = {}
    for patch in patches:
        contour = trace_contour(patch_mask(patch, rect), patch.pixels[0])
        try:
            analysis = analyze_patch(
                patch.id,
                contour,
                max_degree=config.fit_max_degree,
                tolerance=config.fit_tolerance_px,
            )
        except UnfittablePatchError:
            continue
        analyses.append(analysis)
        pixmap[patch.id] = tuple((x + rect.x0, y + rect.y0) for x, y in patch.pixels)
    candidates = []
    for a, b in combinations(analyses, 2):
        ip = intersect(
            a.poly,
            b.poly,
            rect,
            p_anchor=a.midpoints.mean,
            q_anchor=b.midpoints.mean,
            patch_pair=(a.patch_id, b.patch_id),
        )
        if ip is None or ip.crossing_angle < config.min_crossing_angle_deg:
            continue
        cand = decide_window(
            analyses, ip, rect, direction, config.tie_epsilon_px, pixmap
        )
        if cand is not None:
            candidates.append(cand)
    return candidates


def direction_candidates(
    gray: GrayImage,
    direction: CompassDirection,
    rects: list[WindowRect],
    config: PipelineConfig,
) -> list[TangleCandidate]:
    """Full single-mask pass: response, threshold, window sweep."""
    response = edge_response(gray, direction)
    try:
        _, edges = otsu_threshold(response)
    except DegenerateHistogramError:
        return []  # featureless response for this direction; skip it
    out: list[TangleCandidate] = []
    for rect in rects:
        out.extend(window_candidates(edges, rect, direction, config))
    return out


def run_pipeline(
    image: RgbImage, config: PipelineConfig | None = None, workers: int = 1
) -> list[Tangle]:
    """Detect tangles in an image; deterministic for fixed image + config."""
    config = config or PipelineConfig()
    prepared = gaussian_blur(isolate_color(image, config.color_target), config.blur)
    gray = to_grayscale(prepared)
    rects = windows(
        image.width, image.height, config.window_w, config.window_h, config.window_stride
    )
    directions = list(CompassDirection)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            per_direction = list(
                pool.map(lambda d: direction_candidates(gray, d, rects, config), directions)
            )
    else:
        per_direction = [direction_candidates(gray, d, rects, config) for d in directions]
    candidates = [cand for batch in per_direction for cand in batch]
    return merge_candidates(candidates, config.merge_radius_px)


# --- detection JSON wire format ---

def detection_dict(tangles: list[Tangle]) -> dict:
    return {
        "tangles": [
            {
                "x": float(t.position[0]),
                "y": float(t.position[1]),
                "over_patch": {
                    "direction": t.direction.value,
                    "window": list(t.window.as_tuple()),
                    "patch_id": t.over_patch,
                },
                "confidence": float(t.confidence),
            }
            for t in tangles
        ]
    }


def detection_json(tangles: list[Tangle]) -> str:
    """Canonical serialization; key order is fixed for golden-file stability."""
    return json.dumps(detection_dict(tangles), indent=2) + "\n"


def detections_from_dict(d: dict) -> list[Tangle]:
    """Rebuild Tangle objects from detection JSON (no pixel provenance)."""
    try:
        tangles = []
        for entry in d["tangles"]:
            over = entry["over_patch"]
            x0, y0, w, h = (int(v) for v in over["window"])
            tangles.append(
                Tangle(
                    position=(float(entry["x"]), float(entry["y"])),
                    direction=CompassDirection(over["direction"]),
                    window=WindowRect(x0, y0, w, h),
                    over_patch=int(over["patch_id"]),
                    confidence=float(entry["confidence"]),
                    contributing_candidates=1,
                )
            )
        return tangles
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"bad detection JSON: {exc}") from exc
