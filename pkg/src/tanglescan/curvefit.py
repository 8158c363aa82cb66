"""Centerline recovery and intersection of patch curves.

A patch contour is folded onto itself by pairing mirrored points; the pair
midpoints approximate the wire centerline. A low-degree polynomial is fit
to the midpoints by least squares, starting at degree 5 and stepping down
until the fit is well-conditioned and tight, then patch polynomials are
intersected inside the window to localize a tangle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import UnfittablePatchError
from .scanner import WindowRect
from .tracer import Contour

MAX_DEGREE = 5
FIT_TOLERANCE_PX = 1.5
CONDITION_LIMIT = 1e8

_ROOT_TOL = 1e-6


@dataclass(frozen=True)
class Midpoints:
    """Centerline samples from mirrored contour pairs, window coordinates."""

    points: tuple[tuple[float, float], ...]
    mean: tuple[float, float]


@dataclass(frozen=True)
class CenterlinePoly:
    """Least-squares polynomial for one patch centerline.

    `axis` is "x" when the curve is y = p(x), "y" when it is x = p(y).
    The fit is computed on abscissae scaled to [-1, 1] for conditioning;
    `coefficients` converts back to the plain power basis (ascending).
    """

    degree: int
    axis: str
    rms_residual: float
    center: float
    scale: float
    scaled_coeffs: tuple[float, ...]
    coefficients: tuple[float, ...] = field(init=False)

    def __post_init__(self):
        poly = np.polynomial.Polynomial(
            self.scaled_coeffs, domain=[self.center - self.scale, self.center + self.scale]
        )
        object.__setattr__(self, "coefficients", tuple(poly.convert().coef))

    def value(self, t) -> np.ndarray | float:
        u = (np.asarray(t, dtype=np.float64) - self.center) / self.scale
        return np.polynomial.polynomial.polyval(u, self.scaled_coeffs)

    def derivative(self, t) -> np.ndarray | float:
        u = (np.asarray(t, dtype=np.float64) - self.center) / self.scale
        d = np.polynomial.polynomial.polyder(self.scaled_coeffs)
        return np.polynomial.polynomial.polyval(u, d) / self.scale

    def tangent_angle(self, t: float) -> float:
        """Tangent direction in degrees at abscissa t, in image axes."""
        slope = float(self.derivative(t))
        if self.axis == "x":
            return math.degrees(math.atan2(slope, 1.0))
        return math.degrees(math.atan2(1.0, slope))


@dataclass(frozen=True)
class IntersectionPoint:
    """Where two patch centerlines cross, in image coordinates."""

    position: tuple[float, float]
    patch_pair: tuple[int, int]
    crossing_angle: float


@dataclass(frozen=True)
class PatchAnalysis:
    """Everything later stages need about one patch."""

    patch_id: int
    midpoints: Midpoints
    poly: CenterlinePoly


def pair_midpoints(contour: Contour) -> Midpoints:
    """Pair the i-th contour point with its mirror and average each pair.

    With L contour points, index i pairs with L-1-i; the middle point of an
    odd-length contour pairs with itself. The mean is the arithmetic mean
    of the midpoints.
    """
    pts = contour.points
    if not pts:
        raise ValueError("contour has no points")
    length = len(pts)
    mids = []
    for i in range((length + 1) // 2):
        ax, ay = pts[i]
        bx, by = pts[length - 1 - i]
        mids.append(((ax + bx) / 2.0, (ay + by) / 2.0))
    arr = np.asarray(mids, dtype=np.float64)
    mean = (float(arr[:, 0].mean()), float(arr[:, 1].mean()))
    return Midpoints(tuple(map(tuple, arr.tolist())), mean)


def _fit_degree(t: np.ndarray, v: np.ndarray, degree: int) -> tuple[np.ndarray, float, float, float, float]:
    """Least squares at one fixed degree.

    The conditioning gate is measured on the normal system of the problem as
    posed (power basis on the raw abscissae): short patches far from the
    window origin condition terribly at high degree, which is exactly what
    demotes their fits toward straight lines and keeps extrapolation sane.
    The solve itself runs on abscissae scaled to [-1, 1], which computes the
    same least-squares polynomial without the numerical hazard.

    Returns (coeffs, center, scale, rms, condition-of-normal-system).
    """
    raw_vander = np.polynomial.polynomial.polyvander(t, degree)
    normal = raw_vander.T @ raw_vander
    cond = float(np.linalg.cond(normal)) if np.all(np.isfinite(normal)) else np.inf

    center = float((t.max() + t.min()) / 2.0)
    scale = float((t.max() - t.min()) / 2.0)
    u = (t - center) / scale
    vander = np.polynomial.polynomial.polyvander(u, degree)
    coeffs, *_ = np.linalg.lstsq(vander, v, rcond=None)
    residual = vander @ coeffs - v
    rms = float(np.sqrt(np.mean(residual**2)))
    return coeffs, center, scale, rms, cond


def fit_polynomial(
    mids: Midpoints,
    max_degree: int = MAX_DEGREE,
    tolerance: float = FIT_TOLERANCE_PX,
) -> CenterlinePoly:
    """Fit the midpoints, stepping the degree down until the fit is sound.

    The fit axis is whichever coordinate spans the larger extent, so
    near-vertical wire segments fit x = p(y) instead of a hopeless y = p(x).
    A degree is accepted when the normal system's condition number stays
    within bounds and the rms residual is within tolerance. A patch whose
    midpoints no polynomial fits within tolerance (junction composites with
    branched contours, mostly) has no meaningful centerline and is rejected
    as unfittable rather than handed to the intersection stage as a garbage
    curve.
    """
    arr = np.asarray(mids.points, dtype=np.float64)
    extents = arr.max(axis=0) - arr.min(axis=0)
    axis = "x" if extents[0] >= extents[1] else "y"
    if extents.max() == 0:
        raise UnfittablePatchError(
            "midpoints have fewer than 2 distinct abscissae on both axes"
        )
    t, v = (arr[:, 0], arr[:, 1]) if axis == "x" else (arr[:, 1], arr[:, 0])
    distinct = len(np.unique(t))
    degree = min(max_degree, distinct - 1)
    while True:
        coeffs, center, scale, rms, cond = _fit_degree(t, v, degree)
        if cond <= CONDITION_LIMIT and rms <= tolerance:
            return CenterlinePoly(degree, axis, rms, center, scale, tuple(coeffs))
        if degree == 1:
            raise UnfittablePatchError(
                f"no degree <= {min(max_degree, distinct - 1)} polynomial fits the "
                f"midpoints within {tolerance} px (best rms {rms:.2f})"
            )
        degree -= 1


def _scan_roots(f, lo: float, hi: float) -> list[float]:
    """Roots of scalar f on [lo, hi]: 1-px sampling + bisection to 1e-6."""
    n = max(2, int(math.ceil(hi - lo)) + 1)
    xs = np.linspace(lo, hi, n)
    ys = np.array([f(x) for x in xs])
    roots = [float(x) for x, y in zip(xs, ys) if y == 0.0]
    for a, b, fa, fb in zip(xs[:-1], xs[1:], ys[:-1], ys[1:]):
        if fa == 0.0 or fb == 0.0 or fa * fb > 0:
            continue
        lo_, hi_, flo = float(a), float(b), float(fa)
        while hi_ - lo_ > _ROOT_TOL:
            mid = (lo_ + hi_) / 2.0
            fm = f(mid)
            if fm == 0.0:
                lo_ = hi_ = mid
                break
            if flo * fm < 0:
                hi_ = mid
            else:
                lo_, flo = mid, fm
        roots.append((lo_ + hi_) / 2.0)
    return roots


def _candidate_points(p: CenterlinePoly, q: CenterlinePoly, rect: WindowRect) -> list[tuple[float, float]]:
    """Window-local crossing candidates of the two centerlines."""
    pts: list[tuple[float, float]] = []
    if p.axis == q.axis:
        span = rect.w if p.axis == "x" else rect.h
        for t in _scan_roots(lambda t: float(p.value(t) - q.value(t)), 0.0, float(span)):
            other = float(p.value(t))
            pts.append((t, other) if p.axis == "x" else (other, t))
    else:
        xmajor, ymajor = (p, q) if p.axis == "x" else (q, p)
        for x in _scan_roots(lambda x: float(ymajor.value(xmajor.value(x)) - x), 0.0, float(rect.w)):
            pts.append((x, float(xmajor.value(x))))
        for y in _scan_roots(lambda y: float(xmajor.value(ymajor.value(y)) - y), 0.0, float(rect.h)):
            pts.append((float(ymajor.value(y)), y))
    inside = [(x, y) for x, y in pts if 0.0 <= x <= rect.w and 0.0 <= y <= rect.h]
    deduped: list[tuple[float, float]] = []
    for pt in sorted(inside):
        if all(math.dist(pt, seen) > 1e-3 for seen in deduped):
            deduped.append(pt)
    return deduped


def intersect(
    p: CenterlinePoly,
    q: CenterlinePoly,
    rect: WindowRect,
    p_anchor: tuple[float, float] | None = None,
    q_anchor: tuple[float, float] | None = None,
    patch_pair: tuple[int, int] = (0, 1),
) -> IntersectionPoint | None:
    """Crossing of two patch centerlines inside the window, or None.

    When several in-window crossings exist, the one nearest the two patches'
    midpoint means (`p_anchor`, `q_anchor`, window coordinates) wins; the
    physical tangle sits between the patches that produced the curves.
    """
    candidates = _candidate_points(p, q, rect)
    if not candidates:
        return None
    if p_anchor is not None and q_anchor is not None:
        best = min(candidates, key=lambda pt: math.dist(pt, p_anchor) + math.dist(pt, q_anchor))
    else:
        best = candidates[0]
    x, y = best
    t_p = x if p.axis == "x" else y
    t_q = x if q.axis == "x" else y
    angle = abs(p.tangent_angle(t_p) - q.tangent_angle(t_q)) % 180.0
    if angle > 90.0:
        angle = 180.0 - angle
    return IntersectionPoint((x + rect.x0, y + rect.y0), patch_pair, angle)


def analyze_patch(patch_id: int, contour: Contour, **fit_kwargs) -> PatchAnalysis:
    mids = pair_midpoints(contour)
    poly = fit_polynomial(mids, **fit_kwargs)
    return PatchAnalysis(patch_id, mids, poly)
