"""Pipeline configuration and the key/value config file format.

Config files are plain text, one `dotted.key = value` per line, `#` starts
a comment. Values are parsed as JSON where possible (numbers, lists,
null), otherwise kept as strings.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from pathlib import Path

from .curvefit import FIT_TOLERANCE_PX, MAX_DEGREE
from .errors import ConfigError, FileNotFoundInputError
from .preprocess import BlurConfig, ColorTarget
from .scanner import DEFAULT_MIN_PATCH_PIXELS, DEFAULT_STRIDE, DEFAULT_WINDOW
from .verdict import MERGE_RADIUS_PX, TIE_EPSILON_PX


@dataclass(frozen=True)
class PipelineConfig:
    color_target: ColorTarget | None = None
    blur: BlurConfig = BlurConfig()
    window_w: int = DEFAULT_WINDOW
    window_h: int = DEFAULT_WINDOW
    window_stride: int = DEFAULT_STRIDE
    min_patch_pixels: int = DEFAULT_MIN_PATCH_PIXELS
    fit_max_degree: int = MAX_DEGREE
    fit_tolerance_px: float = FIT_TOLERANCE_PX
    tie_epsilon_px: float = TIE_EPSILON_PX
    merge_radius_px: float = MERGE_RADIUS_PX
    # 0 disables the gate: every in-window crossing becomes a candidate.
    # Positive values drop candidate pairs whose centerlines cross shallower
    # than this; near-collinear pairs (fragments of one wire) intersect at
    # noise-determined positions and are best suppressed on clean scenes.
    min_crossing_angle_deg: float = 0.0

    def as_mapping(self) -> dict:
        m = {
            "blur.size": self.blur.size,
            "blur.sigma": self.blur.sigma,
            "window.w": self.window_w,
            "window.h": self.window_h,
            "window.stride": self.window_stride,
            "window.min_patch_pixels": self.min_patch_pixels,
            "fit.max_degree": self.fit_max_degree,
            "fit.tolerance_px": self.fit_tolerance_px,
            "decide.tie_epsilon_px": self.tie_epsilon_px,
            "merge.radius_px": self.merge_radius_px,
            "intersect.min_angle_deg": self.min_crossing_angle_deg,
        }
        if self.color_target is not None:
            m["color.target"] = [self.color_target.r, self.color_target.g, self.color_target.b]
            m["color.tolerance"] = self.color_target.tolerance
        return m


def config_from_mapping(mapping: dict) -> PipelineConfig:
    """Build a PipelineConfig from dotted keys; unknown keys are rejected."""
    cfg = PipelineConfig()
    target_rgb = mapping.get("color.target")
    tolerance = mapping.get("color.tolerance", ColorTarget(0, 0, 0).tolerance)
    try:
        if target_rgb is not None:
            r, g, b = (int(v) for v in target_rgb)
            cfg = replace(cfg, color_target=ColorTarget(r, g, b, float(tolerance)))
        blur = BlurConfig(
            size=int(mapping.get("blur.size", cfg.blur.size)),
            sigma=float(mapping.get("blur.sigma", cfg.blur.sigma)),
        )
        cfg = replace(
            cfg,
            blur=blur,
            window_w=int(mapping.get("window.w", cfg.window_w)),
            window_h=int(mapping.get("window.h", cfg.window_h)),
            window_stride=int(mapping.get("window.stride", cfg.window_stride)),
            min_patch_pixels=int(mapping.get("window.min_patch_pixels", cfg.min_patch_pixels)),
            fit_max_degree=int(mapping.get("fit.max_degree", cfg.fit_max_degree)),
            fit_tolerance_px=float(mapping.get("fit.tolerance_px", cfg.fit_tolerance_px)),
            tie_epsilon_px=float(mapping.get("decide.tie_epsilon_px", cfg.tie_epsilon_px)),
            merge_radius_px=float(mapping.get("merge.radius_px", cfg.merge_radius_px)),
            min_crossing_angle_deg=float(
                mapping.get("intersect.min_angle_deg", cfg.min_crossing_angle_deg)
            ),
        )
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad config value: {exc}") from exc

    known = set(PipelineConfig().as_mapping()) | {"color.target", "color.tolerance"}
    unknown = set(mapping) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    if cfg.window_w < 1 or cfg.window_h < 1 or cfg.window_stride < 1:
        raise ConfigError("window.w, window.h, window.stride must be >= 1")
    if cfg.min_patch_pixels < 1:
        raise ConfigError("window.min_patch_pixels must be >= 1")
    if not 1 <= cfg.fit_max_degree <= MAX_DEGREE:
        raise ConfigError(f"fit.max_degree must be in 1..{MAX_DEGREE}")
    if cfg.fit_tolerance_px <= 0 or cfg.merge_radius_px < 0 or cfg.tie_epsilon_px < 0:
        raise ConfigError("fit.tolerance_px must be positive; radii must be >= 0")
    if not 0 <= cfg.min_crossing_angle_deg <= 90:
        raise ConfigError("intersect.min_angle_deg must be in 0..90")
    return cfg


def parse_config_text(text: str) -> PipelineConfig:
    mapping = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"config line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            mapping[key] = json.loads(value)
        except json.JSONDecodeError:
            mapping[key] = value
    return config_from_mapping(mapping)


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    if not path.is_file():
        raise FileNotFoundInputError(f"no such config file: {path}")
    return parse_config_text(path.read_text())
