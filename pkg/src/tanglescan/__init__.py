"""tanglescan: detect wire tangles (overlaps) in 2-D images.

Reports each tangle's position, which wire passes over, and a confidence
score, using eight directional edge maps and windowed contour geometry.
"""

from .config import PipelineConfig, config_from_mapping, load_config, parse_config_text
from .curvefit import (
    CenterlinePoly,
    IntersectionPoint,
    Midpoints,
    PatchAnalysis,
    analyze_patch,
    fit_polynomial,
    intersect,
    pair_midpoints,
)
from .edgedetect import (
    CompassDirection,
    Histogram,
    OtsuResult,
    edge_response,
    histogram,
    otsu_threshold,
    robinson_masks,
)
from .errors import (
    ConfigError,
    CorruptDataError,
    DegenerateHistogramError,
    FileNotFoundInputError,
    InputError,
    TangleScanError,
    UnfittablePatchError,
    UnsupportedFormatError,
)
from .evaluate import ConfusionRates, evaluate, resolve_over_wire
from .pipeline import detection_dict, detection_json, detections_from_dict, run_pipeline
from .preprocess import (
    BlurConfig,
    ColorTarget,
    gaussian_blur,
    gaussian_kernel,
    isolate_color,
)
from .raster import (
    BinaryImage,
    GrayImage,
    Kernel,
    RgbImage,
    convolve,
    load_image,
    save_annotated,
    save_image,
    to_grayscale,
)
from .scanner import Patch, WindowRect, extract_patches, windows
from .synth import Crossing, GroundTruth, SceneSpec, WireSpec, generate_scene
from .tracer import Connectivity, Contour, find_start, trace_contour
from .verdict import Tangle, TangleCandidate, decide_window, merge_candidates

__version__ = "0.1.0"

__all__ = [
    "BinaryImage",
    "BlurConfig",
    "CenterlinePoly",
    "ColorTarget",
    "CompassDirection",
    "ConfigError",
    "ConfusionRates",
    "Connectivity",
    "Contour",
    "CorruptDataError",
    "Crossing",
    "DegenerateHistogramError",
    "FileNotFoundInputError",
    "GrayImage",
    "GroundTruth",
    "Histogram",
    "InputError",
    "IntersectionPoint",
    "Kernel",
    "Midpoints",
    "OtsuResult",
    "Patch",
    "PatchAnalysis",
    "PipelineConfig",
    "RgbImage",
    "SceneSpec",
    "Tangle",
    "TangleCandidate",
    "TangleScanError",
    "UnfittablePatchError",
    "UnsupportedFormatError",
    "WindowRect",
    "WireSpec",
    "analyze_patch",
    "config_from_mapping",
    "convolve",
    "decide_window",
    "detection_dict",
    "detection_json",
    "detections_from_dict",
    "edge_response",
    "evaluate",
    "fit_polynomial",
    "gaussian_blur",
    "gaussian_kernel",
    "generate_scene",
    "histogram",
    "intersect",
    "isolate_color",
    "load_config",
    "load_image",
    "merge_candidates",
    "otsu_threshold",
    "pair_midpoints",
    "parse_config_text",
    "resolve_over_wire",
    "robinson_masks",
    "run_pipeline",
    "save_annotated",
    "save_image",
    "to_grayscale",
    "trace_contour",
    "find_start",
    "windows",
    "extract_patches",
]
