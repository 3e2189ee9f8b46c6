"""The Savannah scene: downtown blocks, river strip, station, two looping
trains (one braking into the station, one accelerating out), ambient audio,
and its own proximity-driven menu.

Train motion uses plain linear position tracks; the deceleration and
acceleration live entirely in the key spacing (uniform keys, shrinking or
growing displacement spans), not in any easing curve.
"""

from __future__ import annotations

import math
from collections import Counter

from ..scene.schema import build_node
from ..scene.types import Route, SceneGraph, UseRef, Vec3
from .files import (
    CAR_FILE,
    CAR_LENGTH,
    ENGINE_FILE,
    ENGINE_LENGTH,
    STATION_FILE,
    station_scene,
    train_car_scene,
    train_engine_scene,
)
from .params import GenParams, SceneManifest, count_nodes, stats_from_counter
from .parts import box_shape, mesh_shape, terrain_mesh

SAVANNAH_CYCLE_SECONDS = 30.0

_IN_TRACK_Z = 0.12
_OUT_TRACK_Z = 0.22
_STATION_POS = Vec3(0.15, 0.0, 0.15)

# Uniform keys with shrinking spans: per-span speed strictly decreases as
# the incoming train nears the station (and mirrors for the outgoing one).
_KEYS = (0.0, 0.2, 0.4, 0.6, 0.8, 1.0)
_SPAN_WEIGHTS = (0.30, 0.25, 0.20, 0.15, 0.10)


def _displacements(total: float):
    out = [0.0]
    for w in _SPAN_WEIGHTS:
        out.append(out[-1] + w * total)
    return out


def _facade_url(i: int) -> str:
    return f"textures/facade_{i}.png"


def _train(def_prefix: str, car_count: int, start: Vec3):
    """A simply-grouped train: engine inline plus offset car inlines, the
    whole body rotated to face -X (the direction both trains travel)."""
    children = [build_node("Inline", def_name=f"{def_prefix}Engine", url=(ENGINE_FILE,))]
    for i in range(car_count):
        geom = (
            build_node("Inline", def_name=f"{def_prefix}Car", url=(CAR_FILE,))
            if i == 0
            else UseRef(f"{def_prefix}Car")
        )
        children.append(
            build_node(
                "Transform",
                translation=(-(ENGINE_LENGTH + i * CAR_LENGTH), 0.0, 0.0),
                children=[geom],
            )
        )
    body = build_node("Transform", rotation=(0.0, 1.0, 0.0, math.pi), children=children)
    return build_node(
        "Transform", def_name=f"{def_prefix}Train", translation=start.as_tuple(), children=[body]
    )


def build_savannah_parts(p: GenParams, terrain_n: int) -> dict:
    ground_pts, ground_idx = terrain_mesh(2.4, 1.8, terrain_n, terrain_n)
    ground_group = build_node(
        "Group",
        def_name="SavannahGround",
        children=[
            mesh_shape(ground_pts, ground_idx, diffuse=(0.55, 0.62, 0.45)),
            build_node(
                "Transform",
                translation=(0.0, 0.002, 0.75),
                children=[box_shape((2.4, 0.004, 0.3), diffuse=(0.25, 0.4, 0.6))],
            ),
        ],
    )

    buildings = []
    for i in range(p.building_count):
        row, col = divmod(i, 4)
        width = 0.12 + 0.02 * ((i * 3) % 4)
        depth = 0.10 + 0.02 * ((i * 5) % 3)
        height = 0.18 + 0.05 * ((i * 7) % 5)
        x = -0.55 + 0.35 * col
        z = -0.45 + 0.3 * row
        if i < 4:
            app = build_node(
                "Appearance",
                def_name=f"SvApp{i}",
                material=build_node("Material", diffuseColor=(0.7, 0.62, 0.5)),
                texture=build_node("ImageTexture", url=(_facade_url(i),)),
            )
        else:
            app = UseRef(f"SvApp{i % 4}")
        shape = build_node(
            "Shape", appearance=app, geometry=build_node("Box", size=(width, height, depth))
        )
        buildings.append(
            build_node("Transform", translation=(x, height / 2.0, z), children=[shape])
        )
    blocks = build_node("Group", def_name="SavannahBlocks", children=buildings)

    station_group = build_node(
        "Group",
        def_name="SvStationGroup",
        children=[
            build_node(
                "Transform",
                translation=_STATION_POS.as_tuple(),
                children=[build_node("Inline", def_name="SvStation", url=(STATION_FILE,))],
            )
        ],
    )

    # --- trains -----------------------------------------------------------
    in_start_x, in_end_x = 2.2, 0.25
    out_start_x, out_end_x = 0.05, -2.0
    in_kv = [(in_start_x - d, 0.013, _IN_TRACK_Z) for d in _displacements(in_start_x - in_end_x)]
    # outgoing spans run smallest-first so per-span speed strictly increases
    out_cum = [0.0]
    for w in reversed(_SPAN_WEIGHTS):
        out_cum.append(out_cum[-1] + w * (out_start_x - out_end_x))
    out_kv = [(out_start_x - d, 0.013, _OUT_TRACK_Z) for d in out_cum]

    incoming = _train("SvIn", p.car_count, Vec3(*in_kv[0]))
    outgoing = _train("SvOut", p.car_count, Vec3(*out_kv[0]))

    loop = build_node(
        "TimeSensor", def_name="SavannahLoop", cycleInterval=SAVANNAH_CYCLE_SECONDS, loop=True
    )
    interpolators = [
        build_node("PositionInterpolator", def_name="InTrainPos", key=_KEYS, keyValue=in_kv),
        build_node("PositionInterpolator", def_name="OutTrainPos", key=_KEYS, keyValue=out_kv),
        build_node(
            "PositionInterpolator",
            def_name="InCamPos",
            key=_KEYS,
            keyValue=[(x, y + 0.06, z) for x, y, z in in_kv],
        ),
        build_node(
            "PositionInterpolator",
            def_name="OutCamPos",
            key=_KEYS,
            keyValue=[(x, y + 0.06, z) for x, y, z in out_kv],
        ),
    ]

    sound = build_node(
        "Sound",
        def_name="SvAmbient",
        location=(0.2, 0.1, 0.4),
        maxFront=3.0,
        maxBack=3.0,
        source=build_node(
            "AudioClip",
            def_name="SvAmbientClip",
            description="riverfront ambience",
            loop=True,
            url=("audio/savannah_ambient.wav",),
        ),
    )

    prox = build_node(
        "ProximitySensor",
        def_name="SavannahProx",
        center=(0.0, 1.0, 0.2),
        size=(10.0, 10.0, 10.0),
    )
    hud = build_node(
        "Transform",
        def_name="SavannahHud",
        children=[
            build_node(
                "Transform",
                translation=(0.22, 0.12, -0.5),
                children=[
                    box_shape(
                        (0.15, 0.1, 0.004),
                        diffuse=(0.9, 0.9, 0.9),
                        texture_url="textures/menu_savannah.png",
                    )
                ],
            )
        ],
    )

    viewpoints = [
        build_node(
            "Viewpoint",
            def_name="SavannahOverhead",
            description="Savannah Overhead",
            position=(0.0, 2.0, 0.6),
            orientation=(1.0, 0.0, 0.0, -math.pi / 2),
        ),
        build_node(
            "Viewpoint",
            def_name="SavannahGroundLevel",
            description="Savannah Ground Level",
            position=(0.3, 0.05, 0.55),
            orientation=(0.0, 1.0, 0.0, math.pi),
        ),
        build_node(
            "Viewpoint",
            def_name="SavannahTrainStation",
            description="Savannah Train Station",
            position=(0.35, 0.18, 0.45),
            orientation=(0.0, 1.0, 0.0, 0.6),
        ),
        build_node(
            "Viewpoint",
            def_name="SavannahIncomingTrain",
            description="Savannah Incoming Train",
            position=(in_kv[0][0], in_kv[0][1] + 0.06, in_kv[0][2]),
            orientation=(0.0, 1.0, 0.0, math.pi / 2),
        ),
        build_node(
            "Viewpoint",
            def_name="SavannahOutgoingTrain",
            description="Savannah Outgoing Train",
            position=(out_kv[0][0], out_kv[0][1] + 0.06, out_kv[0][2]),
            orientation=(0.0, 1.0, 0.0, math.pi / 2),
        ),
    ]

    routes = [
        Route("SavannahLoop", "fraction_changed", "InTrainPos", "set_fraction"),
        Route("InTrainPos", "value_changed", "SvInTrain", "set_translation"),
        Route("SavannahLoop", "fraction_changed", "OutTrainPos", "set_fraction"),
        Route("OutTrainPos", "value_changed", "SvOutTrain", "set_translation"),
        Route("SavannahLoop", "fraction_changed", "InCamPos", "set_fraction"),
        Route("InCamPos", "value_changed", "SavannahIncomingTrain", "set_position"),
        Route("SavannahLoop", "fraction_changed", "OutCamPos", "set_fraction"),
        Route("OutCamPos", "value_changed", "SavannahOutgoingTrain", "set_position"),
        Route("SavannahProx", "position_changed", "SavannahHud", "set_translation"),
        Route("SavannahProx", "orientation_changed", "SavannahHud", "set_rotation"),
    ]

    content = [
        ground_group,
        blocks,
        station_group,
        incoming,
        outgoing,
        loop,
        *interpolators,
        sound,
        prox,
        hud,
    ]
    viewpoint_flags = (
        ("SavannahOverhead", False),
        ("SavannahGroundLevel", False),
        ("SavannahTrainStation", False),
        ("SavannahIncomingTrain", True),
        ("SavannahOutgoingTrain", True),
    )
    interp_counts = {"PositionInterpolator": 4, "OrientationInterpolator": 0, "ColorInterpolator": 0}
    return {
        "content": content,
        "viewpoints": viewpoints,
        "routes": routes,
        "viewpoint_flags": viewpoint_flags,
        "interp_counts": interp_counts,
    }


def _savannah_tally(p: GenParams, roots, detail) -> Counter:
    tally = count_nodes(roots)
    _, engine_tally = train_engine_scene(detail["engine"])
    _, car_tally = train_car_scene(detail["car"])
    _, station_tally = station_scene(detail["station"])
    tally += station_tally
    # buildings past the first four USE a DEF'd appearance: each site
    # re-instantiates the appearance subtree
    for _ in range(max(0, p.building_count - 4)):
        tally += Counter({"Appearance": 1, "Material": 1, "ImageTexture": 1})
    for _ in range(2):  # two trains, one engine inline each
        tally += engine_tally
        tally += car_tally  # DEF'd car inline
        for _ in range(p.car_count - 1):  # USE sites
            tally += car_tally
            tally += Counter({"Inline": 1})
    return tally


def generate_savannah(p: GenParams = GenParams(), detail: dict | None = None):
    """Standalone Savannah scene plus its declared manifest."""
    from .georgia import default_detail

    detail = detail or default_detail(p)
    parts = build_savannah_parts(p, detail["terrain"])
    roots = (
        build_node("WorldInfo", title="Savannah Scene"),
        build_node("NavigationInfo"),
        build_node(
            "Background",
            skyColor=((0.3, 0.5, 0.8), (0.95, 0.9, 0.8)),
            skyAngle=(1.5708,),
        ),
        *parts["viewpoints"],
        *parts["content"],
    )
    scene = SceneGraph(
        roots=roots,
        routes=tuple(parts["routes"]),
        meta={"title": "Savannah Scene", "generator": "scenery"},
    )
    manifest = SceneManifest(
        stats=stats_from_counter(_savannah_tally(p, roots, detail)),
        viewpoints=parts["viewpoint_flags"],
        route_count=len(parts["routes"]),
        interpolators=parts["interp_counts"],
        files=("Savannah.x3d", STATION_FILE, ENGINE_FILE, CAR_FILE),
    )
    return scene, manifest
