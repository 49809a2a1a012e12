"""
Centroid-based component tracker
"""
from typing import Dict, List

import numpy as np
from scipy.spatial import distance as dist

from pancake_lab.curve_core import ProfileGraph


def centroid(component: ProfileGraph) -> np.ndarray:
    """Axial midpoint and peak height"""
    return np.array([0.5 * (component.nodes[0] + component.nodes[-1]), component.max_height()])


class ComponentTracker:
    """
    Stable component identities across snapshots.

    Components are matched to the previous snapshot by nearest centroid;
    pieces created by a split and unmatched components get fresh ids, and
    ids of vanished components are never reused.
    """

    def __init__(self):
        self.next_id = 0
        self.objects: Dict[int, np.ndarray] = {}

    def register(self, point: np.ndarray) -> int:
        self.objects[self.next_id] = point
        self.next_id += 1
        return self.next_id - 1

    def deregister(self, object_id: int) -> None:
        del self.objects[object_id]

    def update(self, components: List[ProfileGraph]) -> List[int]:
        """
        Assign ids to the components of one snapshot.

        Returns:
            ids in the order of `components`
        """
        if len(components) == 0:
            for object_id in list(self.objects):
                self.deregister(object_id)
            return []

        points = np.array([centroid(c) for c in components])
        ids = [-1] * len(components)

        if self.objects:
            object_ids = list(self.objects.keys())
            D = dist.cdist(np.array(list(self.objects.values())), points)

            # a component that split is inherited by neither piece
            claims = np.bincount(D.argmin(axis=0), minlength=len(object_ids))
            rows = D.min(axis=1).argsort()
            cols = D.argmin(axis=1)[rows]
            used_rows, used_cols = set(), set()
            for row, col in zip(rows, cols):
                if row in used_rows or col in used_cols or claims[row] > 1:
                    continue
                object_id = object_ids[row]
                self.objects[object_id] = points[col]
                ids[col] = object_id
                used_rows.add(row)
                used_cols.add(col)

            for row in set(range(len(object_ids))).difference(used_rows):
                self.deregister(object_ids[row])

        for col, value in enumerate(ids):
            if value < 0:
                ids[col] = self.register(points[col])
        return ids
