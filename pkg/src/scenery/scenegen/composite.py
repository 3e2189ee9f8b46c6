"""The composite scene: Georgia at the origin, Savannah inlined 500 m
below, each content tree wrapped in a LOD whose far child is empty so
neither is ever visible from the other's viewpoints.

The composite root is the Georgia file itself; the emitted bundle is five
scene files (Georgia, Savannah, Station, TrainEngine, TrainCar) plus the
optional debug backdrop, with a JSON manifest sidecar.
"""

from __future__ import annotations

from collections import Counter

from ..scene.schema import build_node
from ..scene.stats import dict_resolver
from ..scene.types import SceneGraph
from .files import (
    BACKDROP_FILE,
    CAR_FILE,
    ENGINE_FILE,
    GEORGIA_FILE,
    SAVANNAH_FILE,
    STATION_FILE,
    backdrop_scene,
    station_scene,
    train_car_scene,
    train_engine_scene,
)
from .georgia import build_georgia_parts, default_detail, _georgia_tally
from .params import GenParams, SceneManifest, count_nodes, stats_from_counter
from .savannah import _savannah_tally, generate_savannah

LOD_RANGE = 100.0


def generate_composite(p: GenParams = GenParams(), detail: dict | None = None):
    """Composite SceneGraph (the Georgia.x3d content) and its manifest."""
    detail = detail or default_detail(p)
    p.validate_offset(LOD_RANGE)
    parts = build_georgia_parts(p, detail["ribbon"])

    georgia_lod = build_node(
        "LOD",
        def_name="GeorgiaLOD",
        center=(0.0, 0.2, 0.0),
        range=(LOD_RANGE,),
        children=[
            build_node("Group", def_name="GeorgiaContent", children=parts["content"]),
            build_node("Group"),
        ],
    )
    savannah_anchor = build_node(
        "Transform",
        def_name="SavannahAnchor",
        translation=p.savannah_offset.as_tuple(),
        children=[
            build_node(
                "LOD",
                def_name="SavannahLOD",
                center=(0.0, 0.2, 0.0),
                range=(LOD_RANGE,),
                children=[
                    build_node("Inline", def_name="SavannahScene", url=(SAVANNAH_FILE,)),
                    build_node("Group"),
                ],
            )
        ],
    )
    roots = (
        build_node("WorldInfo", title="Georgia Scene"),
        build_node("NavigationInfo"),
        build_node(
            "Background",
            skyColor=((0.2, 0.45, 0.8), (0.9, 0.95, 1.0)),
            skyAngle=(1.5708,),
        ),
        *parts["viewpoints"],
        georgia_lod,
        savannah_anchor,
    )
    scene = SceneGraph(
        roots=roots,
        routes=tuple(parts["routes"]),
        meta={"title": "Georgia Scene", "generator": "scenery"},
    )

    savannah_scene, savannah_manifest = generate_savannah(p, detail)
    tally = _georgia_tally(p, roots, detail)
    tally += Counter(savannah_manifest.stats.node_count_by_kind)

    files = (GEORGIA_FILE, SAVANNAH_FILE, STATION_FILE, ENGINE_FILE, CAR_FILE)
    if p.include_debug_backdrop:
        files = files + (BACKDROP_FILE,)

    interp = dict(parts["interp_counts"])
    for kind, n in savannah_manifest.interpolators.items():
        interp[kind] = interp.get(kind, 0) + n

    manifest = SceneManifest(
        stats=stats_from_counter(tally),
        viewpoints=parts["viewpoint_flags"] + savannah_manifest.viewpoints,
        route_count=len(parts["routes"]) + savannah_manifest.route_count,
        interpolators=interp,
        files=files,
        couplings=parts["couplings"],
    )
    return scene, manifest


def generate_bundle(which: str, p: GenParams = GenParams(), detail: dict | None = None):
    """(files dict, manifest) for a generator target; files map names to
    SceneGraphs and double as the Inline resolver for stats/simulation."""
    detail = detail or default_detail(p)
    engine, _ = train_engine_scene(detail["engine"])
    car, _ = train_car_scene(detail["car"])
    if which == "georgia":
        from .georgia import generate_georgia

        scene, manifest = generate_georgia(p, detail)
        files = {GEORGIA_FILE: scene, ENGINE_FILE: engine, CAR_FILE: car}
    elif which == "savannah":
        scene, manifest = generate_savannah(p, detail)
        station, _ = station_scene(detail["station"])
        files = {SAVANNAH_FILE: scene, STATION_FILE: station, ENGINE_FILE: engine, CAR_FILE: car}
    elif which == "composite":
        scene, manifest = generate_composite(p, detail)
        savannah_scene, _ = generate_savannah(p, detail)
        station, _ = station_scene(detail["station"])
        files = {
            GEORGIA_FILE: scene,
            SAVANNAH_FILE: savannah_scene,
            STATION_FILE: station,
            ENGINE_FILE: engine,
            CAR_FILE: car,
        }
    else:
        raise ValueError(f"unknown bundle {which!r}")
    if p.include_debug_backdrop:
        files[BACKDROP_FILE], _ = backdrop_scene()
    return files, manifest


def bundle_resolver(files: dict):
    return dict_resolver(files)
