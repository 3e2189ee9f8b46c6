"""Interpolator tests against independent brute-force oracles.

The oracles deliberately avoid the implementation's machinery: linear scan
instead of bisect for span lookup, hand-rolled RGB<->HSV conversion instead
of colorsys, and a quaternion-angle linearity check instead of re-deriving
slerp.
"""

import math
import random

import pytest

from scenery.runtime import (
    KeyframeTrack,
    interpolate_color,
    interpolate_orientation,
    interpolate_position,
    track_from_node,
)
from scenery.runtime.rotations import quat_angle_between, quat_from_rotation
from scenery.scene import ColorRGB, Rotation, Vec3, build_node


# --- oracles ---------------------------------------------------------------

def scan_span(keys, f):
    """Largest i with keys[i] <= f, by linear scan."""
    i = 0
    for j, k in enumerate(keys):
        if k <= f:
            i = j
    return i


def oracle_position(keys, values, f):
    if f <= keys[0]:
        return values[0]
    if f >= keys[-1]:
        return values[-1]
    i = scan_span(keys, f)
    if keys[i] == f:
        return values[i]
    u = (f - keys[i]) / (keys[i + 1] - keys[i])
    a, b = values[i], values[i + 1]
    return Vec3(a.x + u * (b.x - a.x), a.y + u * (b.y - a.y), a.z + u * (b.z - a.z))


def rgb_to_hsv_oracle(r, g, b):
    mx, mn = max(r, g, b), min(r, g, b)
    d = mx - mn
    if d == 0:
        h = 0.0
    elif mx == r:
        h = ((g - b) / d) % 6
    elif mx == g:
        h = (b - r) / d + 2
    else:
        h = (r - g) / d + 4
    h /= 6.0
    s = 0.0 if mx == 0 else d / mx
    return h, s, mx


def hsv_to_rgb_oracle(h, s, v):
    h = (h % 1.0) * 6.0
    c = v * s
    x = c * (1 - abs(h % 2 - 1))
    m = v - c
    sector = [(c, x, 0), (x, c, 0), (0, c, x), (0, x, c), (x, 0, c), (c, 0, x)]
    r, g, b = sector[min(int(h), 5)]
    return r + m, g + m, b + m


def oracle_color(keys, values, f):
    if f <= keys[0]:
        return values[0]
    if f >= keys[-1]:
        return values[-1]
    i = scan_span(keys, f)
    if keys[i] == f:
        return values[i]
    u = (f - keys[i]) / (keys[i + 1] - keys[i])
    a, b = values[i], values[i + 1]
    ha, sa, va = rgb_to_hsv_oracle(*a.as_tuple())
    hb, sb, vb = rgb_to_hsv_oracle(*b.as_tuple())
    if sa == 0.0 and sb == 0.0:
        ha = hb = 0.0
    elif sa == 0.0:
        ha = hb
    elif sb == 0.0:
        hb = ha
    dh = hb - ha
    if dh > 0.5:
        dh -= 1.0
    elif dh <= -0.5:
        dh += 1.0
    return hsv_to_rgb_oracle(ha + u * dh, sa + u * (sb - sa), va + u * (vb - va))


# --- position --------------------------------------------------------------

def test_midpoint():
    t = KeyframeTrack((0, 1), (Vec3(0, 0, 0), Vec3(10, 0, 0)))
    assert interpolate_position(t, 0.5) == Vec3(5, 0, 0)


def test_clamp_below_and_above():
    t = KeyframeTrack((0, 1), (Vec3(0, 0, 0), Vec3(10, 0, 0)))
    assert interpolate_position(t, -0.2) == Vec3(0, 0, 0)
    assert interpolate_position(t, 1.7) == Vec3(10, 0, 0)


def test_exact_key_returns_stored_value():
    vals = (Vec3(1, 2, 3), Vec3(4, 5, 6), Vec3(7, 8, 9))
    t = KeyframeTrack((0, 0.37, 1), vals)
    for k, v in zip(t.keys, vals):
        assert interpolate_position(t, k) is v


def test_duplicate_keys_step():
    t = KeyframeTrack((0, 0.5, 0.5, 1), (Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0)))
    assert interpolate_position(t, 0.5) == Vec3(2, 0, 0)  # last duplicate wins
    assert interpolate_position(t, 0.499999).x < 1.0
    assert interpolate_position(t, 0.500001).x > 2.0


def test_position_against_scan_oracle():
    rng = random.Random(42)
    for _ in range(200):
        n = rng.randint(1, 8)
        keys = sorted(rng.random() for _ in range(n))
        keys[0] = 0.0
        if n > 1:
            keys[-1] = 1.0
        vals = tuple(Vec3(rng.uniform(-50, 50), rng.uniform(-50, 50), rng.uniform(-50, 50)) for _ in range(n))
        t = KeyframeTrack(keys, vals)
        for _ in range(25):
            f = rng.uniform(-0.2, 1.2)
            got = interpolate_position(t, f)
            want = oracle_position(keys, vals, f)
            assert (got - want).norm() < 1e-12


def test_invalid_tracks_rejected():
    with pytest.raises(ValueError):
        KeyframeTrack((), ())
    with pytest.raises(ValueError):
        KeyframeTrack((0.5, 0.2), (Vec3(0, 0, 0), Vec3(1, 1, 1)))
    with pytest.raises(ValueError):
        KeyframeTrack((0, 2.0), (Vec3(0, 0, 0), Vec3(1, 1, 1)))
    with pytest.raises(ValueError):
        KeyframeTrack((0, 1), (Vec3(0, 0, 0),))


def test_track_from_node():
    node = build_node(
        "PositionInterpolator", key=(0.0, 1.0), keyValue=((0, 0, 0), (1, 1, 1))
    )
    t = track_from_node(node)
    assert t.keys == (0.0, 1.0)
    with pytest.raises(ValueError):
        track_from_node(build_node("Box"))


# --- orientation -----------------------------------------------------------

def test_slerp_bisection_90_degrees():
    t = KeyframeTrack(
        (0, 1),
        (Rotation(Vec3(0, 0, 1), 0.0), Rotation(Vec3(0, 0, 1), math.pi / 2)),
    )
    r = interpolate_orientation(t, 0.5)
    assert abs(r.angle - math.pi / 4) < 1e-9
    assert (r.axis - Vec3(0, 0, 1)).norm() < 1e-9


def test_orientation_exact_keys():
    vals = (Rotation(Vec3(0, 1, 0), 0.3), Rotation(Vec3(1, 0, 0), 4.0))
    t = KeyframeTrack((0, 1), vals)
    assert interpolate_orientation(t, 0.0) is vals[0]
    assert interpolate_orientation(t, 1.0) is vals[1]  # angle > pi preserved


def test_orientation_unit_axis_and_angle_linearity():
    rng = random.Random(7)
    for _ in range(1000):
        a = Rotation(
            Vec3(rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.01, 1)),
            rng.uniform(-3, 3),
        )
        b = Rotation(
            Vec3(rng.uniform(-1, 1), rng.uniform(0.01, 1), rng.uniform(-1, 1)),
            rng.uniform(-3, 3),
        )
        t = KeyframeTrack((0, 1), (a, b))
        qa = quat_from_rotation(a)
        total = quat_angle_between(qa, quat_from_rotation(b))
        f = rng.random()
        r = interpolate_orientation(t, f)
        assert abs(r.axis.norm() - 1.0) < 1e-9
        walked = quat_angle_between(qa, quat_from_rotation(r))
        assert abs(walked - f * total) < 1e-9


def test_slerp_takes_shortest_arc():
    # 350deg apart the short way round is 10deg
    a = Rotation(Vec3(0, 0, 1), math.radians(-175))
    b = Rotation(Vec3(0, 0, 1), math.radians(175))
    t = KeyframeTrack((0, 1), (a, b))
    mid = interpolate_orientation(t, 0.5)
    assert abs(mid.angle - math.pi) < math.radians(6) or abs(mid.angle) < math.radians(6)
    total = quat_angle_between(quat_from_rotation(a), quat_from_rotation(b))
    assert total < math.radians(11)


# --- color -----------------------------------------------------------------

def test_yellow_to_white_midpoint():
    t = KeyframeTrack((0, 1), (ColorRGB(1, 1, 0), ColorRGB(1, 1, 1)))
    mid = interpolate_color(t, 0.5)
    assert abs(mid.r - 1.0) < 1e-6 and abs(mid.g - 1.0) < 1e-6 and abs(mid.b - 0.5) < 1e-6


def test_red_to_green_goes_through_yellow():
    t = KeyframeTrack((0, 1), (ColorRGB(1, 0, 0), ColorRGB(0, 1, 0)))
    mid = interpolate_color(t, 0.5)
    assert abs(mid.r - 1.0) < 1e-6 and abs(mid.g - 1.0) < 1e-6 and abs(mid.b) < 1e-6


def test_color_exact_first_value():
    vals = (ColorRGB(0.2, 0.4, 0.6), ColorRGB(0.9, 0.1, 0.5))
    t = KeyframeTrack((0, 1), vals)
    assert interpolate_color(t, 0.0) is vals[0]


def test_hue_wraps_shortest_way():
    # red (h=0) to magenta-ish (h=0.9): shortest arc crosses h=0 downward
    t = KeyframeTrack((0, 1), (ColorRGB(1, 0, 0), ColorRGB(1, 0, 0.6)))
    mid = interpolate_color(t, 0.5)
    # hue should be ~0.95 (pink/red side), not ~0.45 (green side)
    h, _, _ = rgb_to_hsv_oracle(*mid.as_tuple())
    assert h > 0.85 or h < 0.1


def test_color_against_hsv_oracle():
    rng = random.Random(11)
    for _ in range(300):
        n = rng.randint(1, 5)
        keys = sorted(rng.random() for _ in range(n))
        keys[0] = 0.0
        if n > 1:
            keys[-1] = 1.0
        vals = tuple(
            ColorRGB(rng.random(), rng.random(), rng.random()) for _ in range(n)
        )
        t = KeyframeTrack(keys, vals)
        for _ in range(20):
            f = rng.uniform(-0.1, 1.1)
            got = interpolate_color(t, f)
            want = oracle_color(keys, vals, f)
            w = want if isinstance(want, tuple) else want.as_tuple()
            assert max(abs(x - y) for x, y in zip(got.as_tuple(), w)) < 1e-6
