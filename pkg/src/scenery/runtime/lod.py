"""Distance-based LOD child selection.

Child 0 is selected while the viewer is closer than range[0]; child i while
range[i-1] <= d < range[i]; the last child otherwise.  A distance exactly
on a boundary belongs to the farther child, and there is no hysteresis.
"""

from __future__ import annotations

import math

import numpy as np

from ..scene.schema import get_field
from ..scene.types import Node, NodeKind, Vec3
from ..scene.transform import apply_to_point


def select_lod_child(lod: Node, viewer_pos: Vec3, lod_world: np.ndarray) -> int:
    if lod.kind is not NodeKind.LOD:
        raise ValueError(f"{lod.kind.value} is not a LOD")
    ranges = get_field(lod, "range")
    if not ranges:
        return 0
    center = apply_to_point(lod_world, get_field(lod, "center"))
    d = math.dist(viewer_pos.as_tuple(), center.as_tuple())
    index = sum(1 for r in ranges if d >= r)
    return min(index, max(len(lod.children) - 1, 0))
