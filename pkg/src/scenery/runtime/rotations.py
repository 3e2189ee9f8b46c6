"""Quaternion helpers for slerp and rigid-frame conversions.

Quaternions are (w, x, y, z) tuples.  Axis-angle results are canonicalized
to a non-negative w (angle in [0, pi]); a near-zero rotation reports axis
(0, 0, 1) by convention.
"""

from __future__ import annotations

import math

import numpy as np

from ..scene.types import Rotation, Vec3

_EPS = 1e-12


def quat_from_rotation(rot: Rotation) -> tuple:
    half = 0.5 * rot.angle
    s = math.sin(half)
    return (math.cos(half), rot.axis.x * s, rot.axis.y * s, rot.axis.z * s)


def quat_normalize(q: tuple) -> tuple:
    n = math.sqrt(sum(c * c for c in q))
    if n < _EPS:
        return (1.0, 0.0, 0.0, 0.0)
    return tuple(c / n for c in q)


def rotation_from_quat(q: tuple) -> Rotation:
    w, x, y, z = quat_normalize(q)
    if w < 0.0:
        w, x, y, z = -w, -x, -y, -z
    s = math.sqrt(x * x + y * y + z * z)
    if s < _EPS:
        return Rotation(Vec3(0.0, 0.0, 1.0), 0.0)
    angle = 2.0 * math.atan2(s, w)
    return Rotation(Vec3(x / s, y / s, z / s), angle)


def quat_dot(a: tuple, b: tuple) -> float:
    return sum(x * y for x, y in zip(a, b))


def quat_slerp(a: tuple, b: tuple, u: float) -> tuple:
    """Shortest-arc spherical interpolation; falls back to a normalized
    lerp when the endpoints are nearly parallel."""
    dot = quat_dot(a, b)
    if dot < 0.0:
        b = tuple(-c for c in b)
        dot = -dot
    if dot > 1.0 - 1e-10:
        mixed = tuple((1.0 - u) * x + u * y for x, y in zip(a, b))
        return quat_normalize(mixed)
    theta = math.acos(min(1.0, dot))
    sin_theta = math.sin(theta)
    ka = math.sin((1.0 - u) * theta) / sin_theta
    kb = math.sin(u * theta) / sin_theta
    return tuple(ka * x + kb * y for x, y in zip(a, b))


def quat_angle_between(a: tuple, b: tuple) -> float:
    """Geodesic angle between two unit quaternions (rotation distance)."""
    d = abs(quat_dot(a, b))
    return 2.0 * math.acos(min(1.0, d))


def rotation_from_matrix3(m: np.ndarray) -> Rotation:
    """Axis-angle from an orthonormal 3x3 matrix (Shepperd's method)."""
    t = m[0, 0] + m[1, 1] + m[2, 2]
    if t > 0.0:
        s = math.sqrt(t + 1.0) * 2.0
        q = (0.25 * s, (m[2, 1] - m[1, 2]) / s, (m[0, 2] - m[2, 0]) / s, (m[1, 0] - m[0, 1]) / s)
    elif m[0, 0] >= m[1, 1] and m[0, 0] >= m[2, 2]:
        s = math.sqrt(1.0 + m[0, 0] - m[1, 1] - m[2, 2]) * 2.0
        q = ((m[2, 1] - m[1, 2]) / s, 0.25 * s, (m[0, 1] + m[1, 0]) / s, (m[0, 2] + m[2, 0]) / s)
    elif m[1, 1] >= m[2, 2]:
        s = math.sqrt(1.0 + m[1, 1] - m[0, 0] - m[2, 2]) * 2.0
        q = ((m[0, 2] - m[2, 0]) / s, (m[0, 1] + m[1, 0]) / s, 0.25 * s, (m[1, 2] + m[2, 1]) / s)
    else:
        s = math.sqrt(1.0 + m[2, 2] - m[0, 0] - m[1, 1]) * 2.0
        q = ((m[1, 0] - m[0, 1]) / s, (m[0, 2] + m[2, 0]) / s, (m[1, 2] + m[2, 1]) / s, 0.25 * s)
    return rotation_from_quat(q)
