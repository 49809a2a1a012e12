"""
Surgery
Neck detection, splitting at a pinch and removal of vanishing components
"""
import logging
from typing import List, Optional, Tuple

import numpy as np

from pancake_lab.curve_core import ProfileGraph, resample
from pancake_lab.errors import CurveError, FlowError

logger = logging.getLogger("pancake_lab.flow_engine")

CAP_SAMPLES = 16
MIN_NECK_NODES = 4


def effective_spacing(component: ProfileGraph, spacing: float) -> float:
    """Target spacing capped so that at least 8 segments remain"""
    return min(spacing, component.length() / 8.0)


def needs_resample(component: ProfileGraph, spacing: float) -> bool:
    """True when the spacing has drifted far enough to threaten the factor-4 contract"""
    ds = component.spacings()
    target = effective_spacing(component, spacing)
    mean = ds.mean()
    return bool(ds.max() > 3.0 * ds.min() or mean < 0.5 * target or mean > 1.5 * target)


def neck_index(component: ProfileGraph, pinch_eps: float) -> Optional[int]:
    """Deepest interior local minimum below pinch_eps, or None"""
    u = component.heights
    if len(u) < 3:
        return None
    inner = u[1:-1]
    is_min = (inner <= u[:-2]) & (inner <= u[2:]) & (inner < pinch_eps)
    candidates = np.flatnonzero(is_min) + 1
    if len(candidates) == 0:
        return None
    return int(candidates[np.argmin(u[candidates])])


def _left_piece(x: np.ndarray, u: np.ndarray, cut: float, eps: float) -> np.ndarray:
    u_cut = float(np.interp(cut, x, u))
    keep = x < cut - 1e-9 * eps
    phi = np.linspace(0.0, 0.5 * np.pi, CAP_SAMPLES)
    cap = np.column_stack((cut + eps * np.sin(phi), u_cut * np.cos(phi)))
    cap[-1, 1] = 0.0
    return np.vstack((np.column_stack((x[keep], u[keep])), cap))


def _right_piece(x: np.ndarray, u: np.ndarray, cut: float, eps: float) -> np.ndarray:
    u_cut = float(np.interp(cut, x, u))
    keep = x > cut + 1e-9 * eps
    phi = np.linspace(0.5 * np.pi, 0.0, CAP_SAMPLES)
    cap = np.column_stack((cut - eps * np.sin(phi), u_cut * np.cos(phi)))
    cap[0, 1] = 0.0
    return np.vstack((cap, np.column_stack((x[keep], u[keep]))))


def _closed_piece(points: np.ndarray, closed_ends: Tuple[bool, bool], spacing: float) -> ProfileGraph:
    raw = ProfileGraph(points[:, 0], points[:, 1], closed_ends)
    return resample(raw, effective_spacing(raw, spacing))


def split_component(component: ProfileGraph, index: int, pinch_eps: float,
                    spacing: float) -> Tuple[ProfileGraph, ProfileGraph]:
    """
    Cut at x_k +- 2 eps and close each side with a quarter-ellipse cap of
    axial length eps meeting the axis orthogonally.

    Raises:
        FlowError: neck too close to an end, or not resolvable after refinement
    """
    x0 = float(component.nodes[index])
    lo, hi = x0 - 2.0 * pinch_eps, x0 + 2.0 * pinch_eps

    comp = component
    for attempt in range(2):
        inside = np.count_nonzero((comp.nodes >= lo) & (comp.nodes <= hi))
        if inside >= MIN_NECK_NODES:
            break
        if attempt == 0:
            logger.debug("refining neck at x=%.6g (%d nodes)", x0, inside)
            comp = resample(comp, 0.5 * effective_spacing(comp, spacing))
    else:
        raise FlowError("neck not resolvable", node=(x0, float(component.heights[index])))

    x, u = comp.nodes, comp.heights
    if lo <= x[0] + pinch_eps or hi >= x[-1] - pinch_eps:
        raise FlowError("neck too close to a cap", node=(x0, float(component.heights[index])))

    try:
        left = _closed_piece(_left_piece(x, u, lo, pinch_eps), (comp.closed_ends[0], True), spacing)
        right = _closed_piece(_right_piece(x, u, hi, pinch_eps), (True, comp.closed_ends[1]), spacing)
    except CurveError as exc:
        raise FlowError(f"surgery failed: {exc}", node=(x0, float(component.heights[index]))) from exc
    return left, right


def vanishing(component: ProfileGraph, tip_eps: float) -> bool:
    """Component small enough to be removed"""
    return component.closed and component.diameter() < tip_eps


def split_all(components: List[ProfileGraph], pinch_eps: float, spacing: float):
    """
    Split every component at its deepest sub-threshold neck.

    Returns:
        (new components, list of (x, r) pinch locations)
    """
    result, pinches = [], []
    for comp in components:
        k = neck_index(comp, pinch_eps)
        if k is None:
            result.append(comp)
            continue
        pinches.append((float(comp.nodes[k]), float(comp.heights[k])))
        result.extend(split_component(comp, k, pinch_eps, spacing))
    return result, pinches
