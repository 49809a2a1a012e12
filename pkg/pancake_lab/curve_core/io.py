"""
Snapshot I/O
One CSV per component with an `x,r` header and 17 significant digits
"""
from pathlib import Path
from typing import Optional, Tuple, Union

import pandas as pd

from pancake_lab.errors import CurveError
from .curves import ParamCurve, ProfileGraph

FLOAT_FORMAT = '%.17g'


def write_snapshot(path: Union[str, Path], curve: Union[ProfileGraph, ParamCurve]) -> Path:
    """Write the nodes of a curve as `x,r` rows"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    pts = curve.points
    frame = pd.DataFrame({'x': pts[:, 0], 'r': pts[:, 1]})
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
    return path


def read_snapshot(path: Union[str, Path],
                  closed_ends: Optional[Tuple[bool, bool]] = None) -> ProfileGraph:
    """
    Read a profile graph written by write_snapshot.

    Args:
        path: CSV file
        closed_ends: defaults to "end sits on the axis"
    """
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(path)
    frame = pd.read_csv(path, dtype=float)
    if list(frame.columns) != ['x', 'r']:
        raise CurveError(f"{path}: expected header x,r, got {','.join(frame.columns)}")
    x = frame['x'].to_numpy()
    r = frame['r'].to_numpy()
    if closed_ends is None:
        closed_ends = (r[0] == 0.0, r[-1] == 0.0)
    return ProfileGraph(x, r, closed_ends)


def read_param_curve(path: Union[str, Path], closed: bool = False) -> ParamCurve:
    frame = pd.read_csv(Path(path), dtype=float)
    return ParamCurve(frame[['x', 'r']].to_numpy(), closed=closed)
