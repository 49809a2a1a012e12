"""
Resampling
Arc-length-uniform redistribution of curve nodes by cubic splines
"""
import math
from typing import Union

import numpy as np
from scipy.interpolate import CubicSpline

from pancake_lab.errors import CurveError
from .curves import MIN_NODES, SPACING_FACTOR, ParamCurve, ProfileGraph

# mirror nodes added past each capped end
_MIRROR = 3
_EQUALIZE_PASSES = 6


def _chord_params(pts: np.ndarray) -> np.ndarray:
    return np.concatenate(([0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))))


def _segment_count(length: float, target_spacing: float) -> int:
    if target_spacing > length / MIN_NODES:
        raise CurveError(
            f"spacing {target_spacing:.6g} larger than total length/{MIN_NODES} ({length / MIN_NODES:.6g})"
        )
    return max(int(math.ceil(length / target_spacing - 1e-6)), MIN_NODES)


def _equalize(evaluate, sigma: np.ndarray, periodic: bool) -> np.ndarray:
    """Move spline parameters until consecutive chords are equal"""
    n = len(sigma)
    for _ in range(_EQUALIZE_PASSES):
        pts = evaluate(sigma)
        if periodic:
            pts = np.vstack((pts, evaluate(np.array([sigma[0] + evaluate.period]))))
            sig = np.concatenate((sigma, [sigma[0] + evaluate.period]))
        else:
            sig = sigma
        chords = np.concatenate(([0.0], np.cumsum(np.hypot(*np.diff(pts, axis=0).T))))
        target = np.linspace(0.0, chords[-1], len(sig))
        sigma = np.interp(target, chords, sig)[:n]
    return sigma


class _Spline:
    def __init__(self, params: np.ndarray, pts: np.ndarray, periodic: bool = False):
        bc = 'periodic' if periodic else 'not-a-knot'
        self.sx = CubicSpline(params, pts[:, 0], bc_type=bc)
        self.sr = CubicSpline(params, pts[:, 1], bc_type=bc)
        self.period = params[-1] - params[0]

    def __call__(self, sigma: np.ndarray) -> np.ndarray:
        return np.column_stack((self.sx(sigma), self.sr(sigma)))


def _resample_graph(curve: ProfileGraph, target_spacing: float) -> ProfileGraph:
    pts = curve.points
    s = _chord_params(pts)
    length = s[-1]
    segments = _segment_count(length, target_spacing)

    params, data = s, pts
    k = min(_MIRROR, len(pts) - 1)
    # caps are continued through the axis by r -> -r
    if curve.closed_ends[0]:
        left = pts[k:0:-1] * np.array([1.0, -1.0])
        params = np.concatenate((-s[k:0:-1], params))
        data = np.vstack((left, data))
    if curve.closed_ends[1]:
        right = pts[-2:-k - 2:-1] * np.array([1.0, -1.0])
        params = np.concatenate((params, 2.0 * length - s[-2:-k - 2:-1]))
        data = np.vstack((data, right))

    spline = _Spline(params, data)
    sigma = _equalize(spline, np.linspace(0.0, length, segments + 1), periodic=False)
    new = spline(sigma)
    new[0] = pts[0]
    new[-1] = pts[-1]

    if np.any(np.diff(new[:, 0]) <= 0.0) or np.any(new[1:-1, 1] <= 0.0):
        # spline overshoot; fall back to the chord polyline
        sigma = np.linspace(0.0, length, segments + 1)
        new = np.column_stack((np.interp(sigma, s, pts[:, 0]), np.interp(sigma, s, pts[:, 1])))
        new[0] = pts[0]
        new[-1] = pts[-1]

    graph = ProfileGraph(new[:, 0], new[:, 1], curve.closed_ends)
    if not graph.spacing_ok():
        ds = graph.spacings()
        raise CurveError(
            f"resampled spacing {ds.min():.3g}..{ds.max():.3g} strays beyond a factor "
            f"{SPACING_FACTOR:g} of the mean {ds.mean():.3g}"
        )
    return graph


def _resample_param(curve: ParamCurve, target_spacing: float) -> ParamCurve:
    pts = curve.points
    if curve.closed:
        loop = np.vstack((pts, pts[:1]))
        s = _chord_params(loop)
        length = s[-1]
        segments = _segment_count(length, target_spacing)
        spline = _Spline(s, loop, periodic=True)
        sigma = _equalize(spline, np.linspace(0.0, length, segments + 1)[:-1], periodic=True)
        new = spline(sigma)
        new[0] = pts[0]
        new[:, 1] = np.maximum(new[:, 1], 0.0)
        return ParamCurve(new, closed=True)

    s = _chord_params(pts)
    length = s[-1]
    segments = _segment_count(length, target_spacing)
    spline = _Spline(s, pts)
    sigma = _equalize(spline, np.linspace(0.0, length, segments + 1), periodic=False)
    new = spline(sigma)
    new[0] = pts[0]
    new[-1] = pts[-1]
    new[:, 1] = np.maximum(new[:, 1], 0.0)
    return ParamCurve(new, closed=False)


def resample(curve: Union[ProfileGraph, ParamCurve], target_spacing: float):
    """
    Redistribute nodes uniformly in arc length.

    Endpoints are kept exactly; a ProfileGraph stays monotone in x.

    Raises:
        CurveError: non-positive spacing, spacing above length/8, or a graph
            whose new spacings are not within SPACING_FACTOR of their mean
    """
    if target_spacing <= 0:
        raise CurveError("target spacing must be positive")
    if isinstance(curve, ProfileGraph):
        return _resample_graph(curve, target_spacing)
    return _resample_param(curve, target_spacing)
