"""ProximitySensor evaluation.

The sensor watches an axis-aligned box (center + size) in its local frame.
Crossing in emits enterTime plus an initial pose pair; crossing out emits
exitTime; pose changes while inside emit position_changed and
orientation_changed with the pose expressed in sensor-local coordinates,
which is what lets a HUD transform driven by these events stay glued to
the viewer.  A zero-volume box never fires; containment is inclusive of
the boundary.
"""

from __future__ import annotations

import numpy as np

from ..scene.schema import get_field
from ..scene.types import Node, NodeKind, Vec3
from ..scene.transform import apply_to_point, rotation_matrix
from .model import ViewerPose
from .rotations import rotation_from_matrix3


def _inside(local: Vec3, center: Vec3, size: Vec3) -> bool:
    return (
        abs(local.x - center.x) <= size.x / 2.0
        and abs(local.y - center.y) <= size.y / 2.0
        and abs(local.z - center.z) <= size.z / 2.0
    )


def local_pose(world_inv: np.ndarray, pose: ViewerPose) -> ViewerPose:
    pos = apply_to_point(world_inv, pose.position)
    rot = world_inv[:3, :3] @ rotation_matrix(pose.orientation)[:3, :3]
    return ViewerPose(pos, rotation_from_matrix3(rot))


def evaluate_proximity(
    sensor: Node,
    sensor_world: np.ndarray,
    prev_pose: ViewerPose | None,
    new_pose: ViewerPose,
    now: float,
) -> list:
    """Events as (field, value) pairs, in emission order."""
    if sensor.kind is not NodeKind.ProximitySensor:
        raise ValueError(f"{sensor.kind.value} is not a ProximitySensor")
    if not get_field(sensor, "enabled"):
        return []
    size = get_field(sensor, "size")
    if size.x <= 0.0 or size.y <= 0.0 or size.z <= 0.0:
        return []
    center = get_field(sensor, "center")
    world_inv = np.linalg.inv(sensor_world)

    new_local = local_pose(world_inv, new_pose)
    was_inside = False
    if prev_pose is not None:
        was_inside = _inside(local_pose(world_inv, prev_pose).position, center, size)
    now_inside = _inside(new_local.position, center, size)

    events: list = []
    if now_inside and not was_inside:
        events.append(("enterTime", now))
        events.append(("isActive", True))
        events.append(("position_changed", new_local.position))
        events.append(("orientation_changed", new_local.orientation))
    elif now_inside and was_inside and prev_pose != new_pose:
        events.append(("position_changed", new_local.position))
        events.append(("orientation_changed", new_local.orientation))
    elif was_inside and not now_inside:
        events.append(("exitTime", now))
        events.append(("isActive", False))
    return events
