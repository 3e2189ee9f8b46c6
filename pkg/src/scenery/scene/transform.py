"""World-transform computation over the scene tree.

Transforms compose per the full X3D rule

    P' = T * C * R * SR * S * -SR * -C * P

(translation, center, rotation, scaleOrientation, scale), even though the
generator only exercises translation + rotation + center.  Matrices are
4x4 float64 numpy arrays acting on column vectors.
"""

from __future__ import annotations

import math

import numpy as np

from .schema import get_field
from .types import Node, NodeKind, Rotation, SceneGraph, UseRef, Vec3


def identity() -> np.ndarray:
    return np.eye(4)


def translation_matrix(v: Vec3) -> np.ndarray:
    m = np.eye(4)
    m[0, 3] = v.x
    m[1, 3] = v.y
    m[2, 3] = v.z
    return m


def rotation_matrix(rot: Rotation) -> np.ndarray:
    """Rodrigues rotation about a unit axis."""
    x, y, z = rot.axis.x, rot.axis.y, rot.axis.z
    c = math.cos(rot.angle)
    s = math.sin(rot.angle)
    t = 1.0 - c
    m = np.eye(4)
    m[:3, :3] = [
        [t * x * x + c, t * x * y - s * z, t * x * z + s * y],
        [t * x * y + s * z, t * y * y + c, t * y * z - s * x],
        [t * x * z - s * y, t * y * z + s * x, t * z * z + c],
    ]
    return m


def scale_matrix(v: Vec3) -> np.ndarray:
    m = np.eye(4)
    m[0, 0] = v.x
    m[1, 1] = v.y
    m[2, 2] = v.z
    return m


def local_matrix(
    translation: Vec3,
    rotation: Rotation,
    scale: Vec3,
    scale_orientation: Rotation,
    center: Vec3,
) -> np.ndarray:
    t = translation_matrix(translation)
    c = translation_matrix(center)
    c_inv = translation_matrix(Vec3(-center.x, -center.y, -center.z))
    r = rotation_matrix(rotation)
    sr = rotation_matrix(scale_orientation)
    sr_inv = rotation_matrix(Rotation(scale_orientation.axis, -scale_orientation.angle))
    s = scale_matrix(scale)
    return t @ c @ r @ sr @ s @ sr_inv @ c_inv


def node_local_matrix(node: Node) -> np.ndarray:
    """Local matrix of a node: non-identity only for Transform."""
    if node.kind is not NodeKind.Transform:
        return identity()
    return local_matrix(
        get_field(node, "translation"),
        get_field(node, "rotation"),
        get_field(node, "scale"),
        get_field(node, "scaleOrientation"),
        get_field(node, "center"),
    )


def apply_to_point(m: np.ndarray, p: Vec3) -> Vec3:
    v = m @ np.array([p.x, p.y, p.z, 1.0])
    return Vec3(v[0], v[1], v[2])


class UnknownPathError(KeyError):
    """The given node path does not address a node in the scene."""


def _resolve_step(current, step):
    if not isinstance(current, Node):
        raise UnknownPathError(f"cannot descend through {current!r}")
    if isinstance(step, int):
        if not 0 <= step < len(current.children):
            raise UnknownPathError(f"child index {step} out of range")
        return current.children[step]
    value = current.fields.get(step)
    if not isinstance(value, (Node, UseRef)):
        raise UnknownPathError(f"{current.kind.value}.{step} is not a node field")
    return value


def _find_def_path(scene: SceneGraph, name: str):
    from .types import walk_scene

    for item, path in walk_scene(scene):
        if isinstance(item, Node) and item.def_name == name:
            return path
    return None


def resolve_path(scene: SceneGraph, path):
    """Normalize a node address to an index path.

    Accepts an iterable of steps (ints for child indices, strings for
    SFNode field names), a '/'-joined string of such steps, or a bare DEF
    name, which resolves to the definition site.
    """
    if isinstance(path, str):
        if "/" in path:
            steps = []
            for part in path.strip("/").split("/"):
                steps.append(int(part) if part.lstrip("-").isdigit() else part)
            return tuple(steps)
        found = _find_def_path(scene, path)
        if found is None:
            raise UnknownPathError(f"no node DEF'd {path!r}")
        return found
    return tuple(path)


def world_transform(scene: SceneGraph, path) -> np.ndarray:
    """Product of ancestor Transform matrices down to (and including) the node.

    The addressed node's own local matrix is included, so the result maps
    the node's child space into world space.
    """
    steps = resolve_path(scene, path)
    if not steps:
        raise UnknownPathError("empty path")
    root_idx = steps[0]
    if not isinstance(root_idx, int) or not 0 <= root_idx < len(scene.roots):
        raise UnknownPathError(f"bad root index {root_idx!r}")
    current = scene.roots[root_idx]
    m = identity()
    if isinstance(current, Node):
        m = m @ node_local_matrix(current)
    for step in steps[1:]:
        current = _resolve_step(current, step)
        if isinstance(current, Node):
            m = m @ node_local_matrix(current)
    if not isinstance(current, Node):
        raise UnknownPathError("path ends at a USE reference")
    return m
