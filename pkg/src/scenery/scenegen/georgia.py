"""The Georgia scene: map, articulated train, synchronized cameras, cycling
spotlight, proximity-driven navigation menu.

The train is one translation-animated body whose sections nest: each
section's Transform pivots (center field) at its front coupling, so a
trailing car's hinge point is, identically, the same local point as its
leader's rear coupling.  Every non-spotlight animation hangs off the one
shared TimeSensor, triggered by touching the train or the menu's train
picture; the spotlight color cycles yellow-white-yellow on its own 12 s
looping clock.
"""

from __future__ import annotations

import math
from collections import Counter

from ..scene.schema import build_node
from ..scene.types import Route, SceneGraph, UseRef, Vec3, snap32
from .files import (
    BACKDROP_FILE,
    CAR_FILE,
    CAR_LENGTH,
    ENGINE_FILE,
    ENGINE_LENGTH,
    backdrop_scene,
    train_car_scene,
    train_engine_scene,
)
from .params import GenParams, SceneManifest, count_nodes, stats_from_counter
from .parts import box_shape, facing_about_y, heading_about_y, mesh_shape, ribbon_mesh

TRAIN_CYCLE_SECONDS = 24.0
SUN_CYCLE_SECONDS = 12.0
PARKED_START_TIME = -1000.0  # well before any script time: the timer idles

# Atlanta (north-west) to Savannah (south-east) across the desk-scale map.
TRAIN_PATH = (
    Vec3(-0.70, 0.03, -0.30),
    Vec3(-0.38, 0.03, -0.20),
    Vec3(-0.10, 0.03, -0.14),
    Vec3(0.18, 0.03, 0.02),
    Vec3(0.42, 0.03, 0.20),
    Vec3(0.62, 0.03, 0.34),
)


def _path_keys(path):
    lengths = [0.0]
    for a, b in zip(path, path[1:]):
        lengths.append(lengths[-1] + (b - a).norm())
    total = lengths[-1]
    return [l / total for l in lengths], total


def _span_headings(path):
    return [heading_about_y(b.x - a.x, b.z - a.z) for a, b in zip(path, path[1:])]


def _heading_at(keys, headings, k: float) -> float:
    if k <= keys[0]:
        return headings[0]
    for j in range(len(headings)):
        if k < keys[j + 1]:
            return headings[j]
    return headings[-1]


def _pos_at(keys, path, k: float) -> Vec3:
    if k <= 0.0:
        return path[0]
    if k >= 1.0:
        return path[-1]
    for j in range(len(path) - 1):
        if k < keys[j + 1]:
            u = (k - keys[j]) / (keys[j + 1] - keys[j])
            d = path[j + 1] - path[j]
            return path[j] + d.scaled(u)
    return path[-1]


def _yaw(angle: float):
    return (0.0, 1.0, 0.0, angle)


def build_georgia_parts(p: GenParams, ribbon_segments: int) -> dict:
    """Content nodes, viewpoints, routes and bookkeeping shared by the
    standalone Georgia scene and the composite."""
    keys, path_len = _path_keys(TRAIN_PATH)
    headings = _span_headings(TRAIN_PATH)
    sections = 1 + p.car_count

    # Section hinge centers in their parent's child space: the engine pivots
    # at the path point; car i pivots where car i-1's body ends.
    centers = [Vec3(0.0, 0.0, 0.0)]
    for i in range(1, sections):
        centers.append(Vec3(-(ENGINE_LENGTH + (i - 1) * CAR_LENGTH), 0.0, 0.0))
    lags = [0.0] + [
        (ENGINE_LENGTH + (i - 1) * CAR_LENGTH) / path_len for i in range(1, sections)
    ]

    # --- train ---------------------------------------------------------
    innermost = None
    for i in reversed(range(sections)):
        children = []
        if i == 0:
            children.append(build_node("Inline", def_name="GaEngine", url=(ENGINE_FILE,)))
        else:
            geom = (
                build_node("Inline", def_name="GaCar", url=(CAR_FILE,))
                if i == 1
                else UseRef("GaCar")
            )
            children.append(
                build_node(
                    "Transform",
                    translation=(centers[i].x, 0.0, 0.0),
                    children=[geom],
                )
            )
        if innermost is not None:
            children.append(innermost)
        innermost = build_node(
            "Transform",
            def_name=f"TrainSec{i}",
            center=centers[i].as_tuple(),
            children=children,
        )
    train = build_node(
        "Transform",
        def_name="TrainBody",
        translation=TRAIN_PATH[0].as_tuple(),
        children=[build_node("TouchSensor", def_name="TrainTouch"), innermost],
    )

    # --- interpolators -------------------------------------------------
    interpolators = [
        build_node(
            "PositionInterpolator",
            def_name="TrainPathPos",
            key=keys,
            keyValue=[w.as_tuple() for w in TRAIN_PATH],
        )
    ]
    for i in range(sections):
        values = []
        for k in keys:
            yaw = _heading_at(keys, headings, k - lags[i])
            if i > 0:
                yaw -= _heading_at(keys, headings, k - lags[i - 1])
            values.append(_yaw(yaw))
        interpolators.append(
            build_node(
                "OrientationInterpolator",
                def_name=f"TrainSec{i}Rot",
                key=keys,
                keyValue=values,
            )
        )

    mid = _pos_at(keys, TRAIN_PATH, 0.5)
    arc_center = Vec3(mid.x, 0.0, mid.z)
    arc_radius, arc_height = 0.8, 0.45
    phi0 = heading_about_y(TRAIN_PATH[-1].x - TRAIN_PATH[0].x, TRAIN_PATH[-1].z - TRAIN_PATH[0].z)
    cam_keys = [j / 8.0 for j in range(9)]
    arc_pos, arc_rot = [], []
    for k in cam_keys:
        phi = phi0 + math.pi * k
        pos = Vec3(
            arc_center.x + arc_radius * math.cos(phi),
            arc_height,
            arc_center.z + arc_radius * math.sin(phi),
        )
        arc_pos.append(pos.as_tuple())
        arc_rot.append(_yaw(facing_about_y(arc_center.x - pos.x, arc_center.z - pos.z)))
    interpolators.append(
        build_node("PositionInterpolator", def_name="MovingCamPos", key=cam_keys, keyValue=arc_pos)
    )
    interpolators.append(
        build_node("OrientationInterpolator", def_name="MovingCamRot", key=cam_keys, keyValue=arc_rot)
    )

    cam_offset = Vec3(0.0, 0.06, 0.0)
    engine_pos = [(w + cam_offset).as_tuple() for w in TRAIN_PATH]
    engine_rot = []
    for j in range(len(TRAIN_PATH)):
        h = headings[min(j, len(headings) - 1)]
        d = (math.cos(h), -math.sin(h))  # heading yaw back to a direction
        engine_rot.append(_yaw(facing_about_y(d[0], d[1])))
    interpolators.append(
        build_node("PositionInterpolator", def_name="EngineCamPos", key=keys, keyValue=engine_pos)
    )
    interpolators.append(
        build_node("OrientationInterpolator", def_name="EngineCamRot", key=keys, keyValue=engine_rot)
    )

    ground_pos = Vec3(0.05, 0.06, 0.32)
    ground_rot = [
        _yaw(facing_about_y(w.x - ground_pos.x, w.z - ground_pos.z)) for w in TRAIN_PATH
    ]
    interpolators.append(
        build_node("OrientationInterpolator", def_name="GroundCamRot", key=keys, keyValue=ground_rot)
    )

    sun_colors = ((1.0, 1.0, 0.0), (1.0, 1.0, 1.0), (1.0, 1.0, 0.0))
    interpolators.append(
        build_node(
            "ColorInterpolator", def_name="SunColor", key=(0.0, 0.5, 1.0), keyValue=sun_colors
        )
    )

    # --- static map ----------------------------------------------------
    rib_pts, rib_idx = ribbon_mesh(TRAIN_PATH, 0.012, ribbon_segments)
    map_group = build_node(
        "Group",
        def_name="GeorgiaMap",
        children=[
            build_node(
                "Transform",
                translation=(0.0, -0.01, 0.0),
                children=[
                    box_shape(
                        (2.0, 0.02, 1.5),
                        diffuse=(0.85, 0.9, 0.8),
                        texture_url="textures/georgia_map.png",
                    )
                ],
            ),
            mesh_shape(rib_pts, rib_idx, diffuse=(0.25, 0.22, 0.2)),
        ],
    )

    # --- lighting, menu, sensors ----------------------------------------
    spot = build_node(
        "SpotLight",
        def_name="RouteSpot",
        location=(mid.x, 1.5, mid.z),
        direction=(0.0, -1.0, 0.0),
        color=(1.0, 1.0, 0.0),
        cutOffAngle=1.2,
        radius=10.0,
    )
    sun_timer = build_node(
        "TimeSensor", def_name="SunTimer", cycleInterval=SUN_CYCLE_SECONDS, loop=True
    )
    train_timer = build_node(
        "TimeSensor",
        def_name="TrainPathTimer",
        cycleInterval=TRAIN_CYCLE_SECONDS,
        startTime=PARKED_START_TIME,
    )
    prox = build_node(
        "ProximitySensor", def_name="GeorgiaProx", center=(0.0, 1.0, 0.0), size=(10.0, 10.0, 10.0)
    )
    hud = build_node(
        "Transform",
        def_name="GeorgiaHud",
        children=[
            build_node(
                "Transform",
                translation=(0.22, 0.12, -0.5),
                children=[
                    box_shape(
                        (0.15, 0.1, 0.004),
                        diffuse=(0.9, 0.9, 0.9),
                        texture_url="textures/menu_georgia.png",
                    ),
                    build_node("TouchSensor", def_name="MenuTrainTouch"),
                ],
            )
        ],
    )

    content = [map_group, train, train_timer, *interpolators, spot, sun_timer, prox, hud]

    if p.include_debug_camera_cube:
        content.append(
            build_node(
                "Transform",
                def_name="MovingCamMarker",
                translation=arc_pos[0],
                children=[box_shape((0.03, 0.03, 0.03), diffuse=(1.0, 0.0, 0.0))],
            )
        )
    if p.include_debug_backdrop:
        content.append(build_node("Inline", def_name="GaBackdrop", url=(BACKDROP_FILE,)))

    # --- viewpoints ------------------------------------------------------
    viewpoints = [
        build_node(
            "Viewpoint",
            def_name="GeorgiaOverhead",
            description="Georgia Overhead",
            position=(0.0, 2.2, 0.0),
            orientation=(1.0, 0.0, 0.0, -math.pi / 2),
        ),
        build_node(
            "Viewpoint",
            def_name="GeorgiaGroundLevel",
            description="Georgia Ground Level",
            position=ground_pos.as_tuple(),
            orientation=ground_rot[0],
        ),
        build_node(
            "Viewpoint",
            def_name="GeorgiaEngineLevel",
            description="Georgia Engine Level",
            position=engine_pos[0],
            orientation=engine_rot[0],
        ),
        build_node(
            "Viewpoint",
            def_name="GeorgiaMovingCamera",
            description="Georgia Moving Camera",
            position=arc_pos[0],
            orientation=arc_rot[0],
        ),
    ]

    routes = [
        Route("TrainTouch", "touchTime", "TrainPathTimer", "set_startTime"),
        Route("MenuTrainTouch", "touchTime", "TrainPathTimer", "set_startTime"),
        Route("TrainPathTimer", "fraction_changed", "TrainPathPos", "set_fraction"),
        Route("TrainPathPos", "value_changed", "TrainBody", "set_translation"),
    ]
    for i in range(sections):
        routes.append(
            Route("TrainPathTimer", "fraction_changed", f"TrainSec{i}Rot", "set_fraction")
        )
        routes.append(Route(f"TrainSec{i}Rot", "value_changed", f"TrainSec{i}", "set_rotation"))
    routes += [
        Route("TrainPathTimer", "fraction_changed", "MovingCamPos", "set_fraction"),
        Route("MovingCamPos", "value_changed", "GeorgiaMovingCamera", "set_position"),
        Route("TrainPathTimer", "fraction_changed", "MovingCamRot", "set_fraction"),
        Route("MovingCamRot", "value_changed", "GeorgiaMovingCamera", "set_orientation"),
        Route("TrainPathTimer", "fraction_changed", "EngineCamPos", "set_fraction"),
        Route("EngineCamPos", "value_changed", "GeorgiaEngineLevel", "set_position"),
        Route("TrainPathTimer", "fraction_changed", "EngineCamRot", "set_fraction"),
        Route("EngineCamRot", "value_changed", "GeorgiaEngineLevel", "set_orientation"),
        Route("TrainPathTimer", "fraction_changed", "GroundCamRot", "set_fraction"),
        Route("GroundCamRot", "value_changed", "GeorgiaGroundLevel", "set_orientation"),
        Route("SunTimer", "fraction_changed", "SunColor", "set_fraction"),
        Route("SunColor", "value_changed", "RouteSpot", "set_color"),
        Route("GeorgiaProx", "position_changed", "GeorgiaHud", "set_translation"),
        Route("GeorgiaProx", "orientation_changed", "GeorgiaHud", "set_rotation"),
    ]
    if p.include_debug_camera_cube:
        routes.append(Route("MovingCamPos", "value_changed", "MovingCamMarker", "set_translation"))

    couplings = tuple(
        (f"TrainSec{i - 1}", f"TrainSec{i}", (snap32(centers[i].x), 0.0, 0.0))
        for i in range(1, sections)
    )
    viewpoint_flags = (
        ("GeorgiaOverhead", False),
        ("GeorgiaGroundLevel", True),
        ("GeorgiaEngineLevel", True),
        ("GeorgiaMovingCamera", True),
    )
    interp_counts = {
        "PositionInterpolator": 3,
        "OrientationInterpolator": sections + 3,
        "ColorInterpolator": 1,
    }
    return {
        "content": content,
        "viewpoints": viewpoints,
        "routes": routes,
        "couplings": couplings,
        "viewpoint_flags": viewpoint_flags,
        "interp_counts": interp_counts,
        "car_use_sites": p.car_count - 1,
        "backdrop_inlined": p.include_debug_backdrop,
    }


def default_detail(p: GenParams) -> dict:
    return {
        "engine": p.mesh_density,
        "car": max(8, int(p.mesh_density * 0.8)),
        "station": max(8, int(p.mesh_density * 0.25)),
        "terrain": max(3, int(math.sqrt(p.mesh_density / 3.0)) + 1),
        "ribbon": max(1, p.mesh_density // 100),
    }


def _georgia_tally(p: GenParams, roots, detail) -> Counter:
    tally = count_nodes(roots)
    _, engine_tally = train_engine_scene(detail["engine"])
    _, car_tally = train_car_scene(detail["car"])
    tally += engine_tally  # GaEngine inline, one site
    tally += car_tally  # GaCar inline DEF site
    for _ in range(p.car_count - 1):  # each USE site re-instantiates the inline
        tally += car_tally
        tally += Counter({"Inline": 1})
    if p.include_debug_backdrop:
        _, backdrop_tally = backdrop_scene()
        tally += backdrop_tally
    return tally


def generate_georgia(p: GenParams = GenParams(), detail: dict | None = None):
    """Standalone Georgia scene plus its declared manifest."""
    detail = detail or default_detail(p)
    parts = build_georgia_parts(p, detail["ribbon"])
    roots = (
        build_node("WorldInfo", title="Georgia Scene"),
        build_node("NavigationInfo"),
        build_node(
            "Background",
            skyColor=((0.2, 0.45, 0.8), (0.9, 0.95, 1.0)),
            skyAngle=(1.5708,),
        ),
        *parts["viewpoints"],
        *parts["content"],
    )
    scene = SceneGraph(
        roots=roots,
        routes=tuple(parts["routes"]),
        meta={"title": "Georgia Scene", "generator": "scenery"},
    )
    manifest = SceneManifest(
        stats=stats_from_counter(_georgia_tally(p, roots, detail)),
        viewpoints=parts["viewpoint_flags"],
        route_count=len(parts["routes"]),
        interpolators=parts["interp_counts"],
        files=(
            ("Georgia.x3d", ENGINE_FILE, CAR_FILE)
            + ((BACKDROP_FILE,) if p.include_debug_backdrop else ())
        ),
        couplings=parts["couplings"],
    )
    return scene, manifest
