"""Keyframe interpolation: piecewise-linear positions, slerp orientations,
HSV-space colors.

All three share the same key lookup: the fraction is clamped to the key
range, an exact key hit returns the stored value untouched (on duplicate
keys the last duplicate wins), and otherwise the bracketing span is
interpolated.  Clamp-and-exactness is load-bearing: traces compare against
keyValues bit-for-bit at key times.
"""

from __future__ import annotations

import colorsys
from bisect import bisect_right
from dataclasses import dataclass

from ..scene.schema import get_field
from ..scene.types import ColorRGB, Node, NodeKind, Rotation, Vec3
from .rotations import quat_from_rotation, quat_slerp, rotation_from_quat


@dataclass(frozen=True)
class KeyframeTrack:
    """key/keyValue arrays; keys non-decreasing in [0, 1], one value each."""

    keys: tuple
    values: tuple

    def __post_init__(self):
        keys = tuple(float(k) for k in self.keys)
        values = tuple(self.values)
        object.__setattr__(self, "keys", keys)
        object.__setattr__(self, "values", values)
        if len(keys) != len(values) or len(keys) < 1:
            raise ValueError(
                f"key/keyValue lengths {len(keys)}/{len(values)} (need equal, >= 1)"
            )
        if any(b < a for a, b in zip(keys, keys[1:])):
            raise ValueError("keys must be non-decreasing")
        if any(not 0.0 <= k <= 1.0 for k in keys):
            raise ValueError("keys must lie in [0, 1]")


_TRACK_KINDS = {
    NodeKind.PositionInterpolator,
    NodeKind.OrientationInterpolator,
    NodeKind.ColorInterpolator,
}


def track_from_node(node: Node) -> KeyframeTrack:
    if node.kind not in _TRACK_KINDS:
        raise ValueError(f"{node.kind.value} is not an interpolator")
    return KeyframeTrack(get_field(node, "key"), get_field(node, "keyValue"))


def _locate(keys: tuple, f: float):
    """('exact', i) for a key hit or clamp, else ('span', i, u)."""
    if f <= keys[0]:
        return ("exact", 0, 0.0)
    if f >= keys[-1]:
        return ("exact", len(keys) - 1, 0.0)
    i = bisect_right(keys, f) - 1
    if keys[i] == f:
        return ("exact", i, 0.0)
    u = (f - keys[i]) / (keys[i + 1] - keys[i])
    return ("span", i, u)


def interpolate_position(track: KeyframeTrack, f: float) -> Vec3:
    where, i, u = _locate(track.keys, f)
    if where == "exact":
        return track.values[i]
    a: Vec3 = track.values[i]
    b: Vec3 = track.values[i + 1]
    return Vec3(
        a.x + u * (b.x - a.x),
        a.y + u * (b.y - a.y),
        a.z + u * (b.z - a.z),
    )


def interpolate_orientation(track: KeyframeTrack, f: float) -> Rotation:
    where, i, u = _locate(track.keys, f)
    if where == "exact":
        return track.values[i]
    qa = quat_from_rotation(track.values[i])
    qb = quat_from_rotation(track.values[i + 1])
    return rotation_from_quat(quat_slerp(qa, qb, u))


def _hsv_pair(a: ColorRGB, b: ColorRGB):
    """HSV endpoints with the achromatic-hue rule: a saturation-0 endpoint
    takes its peer's hue; two achromatic endpoints take hue 0."""
    ha, sa, va = colorsys.rgb_to_hsv(a.r, a.g, a.b)
    hb, sb, vb = colorsys.rgb_to_hsv(b.r, b.g, b.b)
    if sa == 0.0 and sb == 0.0:
        ha = hb = 0.0
    elif sa == 0.0:
        ha = hb
    elif sb == 0.0:
        hb = ha
    return (ha, sa, va), (hb, sb, vb)


def interpolate_color(track: KeyframeTrack, f: float) -> ColorRGB:
    where, i, u = _locate(track.keys, f)
    if where == "exact":
        return track.values[i]
    (ha, sa, va), (hb, sb, vb) = _hsv_pair(track.values[i], track.values[i + 1])
    dh = hb - ha
    if dh > 0.5:
        dh -= 1.0
    elif dh <= -0.5:
        dh += 1.0  # exact half-circle ties resolve to increasing hue
    h = (ha + u * dh) % 1.0
    s = sa + u * (sb - sa)
    v = va + u * (vb - va)
    r, g, b = colorsys.hsv_to_rgb(h, s, v)
    return ColorRGB(min(1.0, max(0.0, r)), min(1.0, max(0.0, g)), min(1.0, max(0.0, b)))
