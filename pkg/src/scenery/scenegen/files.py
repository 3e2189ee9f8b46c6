"""Standalone geometry files: train engine, train car, station, backdrop.

Each is a complete little scene referenced by Inline from the Georgia and
Savannah scenes, mirroring how the original project pulled imported models
in by URL.  Section-local train coordinates span x in [-length, 0] with the
front coupling at the origin, which is what the nested hinge transforms
pivot on.
"""

from __future__ import annotations

from collections import Counter

from ..scene.schema import build_node
from ..scene.types import SceneGraph
from .params import count_nodes
from .parts import box_shape, mesh_shape, prism_mesh

ENGINE_LENGTH = 0.12
ENGINE_HEIGHT = 0.035
ENGINE_WIDTH = 0.04
CAR_LENGTH = 0.10
CAR_HEIGHT = 0.03
CAR_WIDTH = 0.038

ENGINE_FILE = "TrainEngine.x3d"
CAR_FILE = "TrainCar.x3d"
STATION_FILE = "Station.x3d"
BACKDROP_FILE = "WhiteRectangleBackdrop.x3d"
GEORGIA_FILE = "Georgia.x3d"
SAVANNAH_FILE = "Savannah.x3d"


def _file_scene(title: str, nodes) -> tuple:
    roots = (build_node("WorldInfo", title=title),) + tuple(nodes)
    scene = SceneGraph(roots=roots, meta={"title": title, "generator": "scenery"})
    return scene, count_nodes(roots)


def train_engine_scene(density: int) -> tuple:
    points, index = prism_mesh(ENGINE_LENGTH, ENGINE_HEIGHT, ENGINE_WIDTH, density)
    body = mesh_shape(points, index, diffuse=(0.16, 0.22, 0.45))
    cab = build_node(
        "Transform",
        translation=(-ENGINE_LENGTH * 0.78, ENGINE_HEIGHT + 0.008, 0.0),
        children=[box_shape((0.028, 0.016, ENGINE_WIDTH * 0.9), diffuse=(0.2, 0.25, 0.5))],
    )
    stack = build_node(
        "Transform",
        translation=(-ENGINE_LENGTH * 0.15, ENGINE_HEIGHT + 0.01, 0.0),
        children=[box_shape((0.008, 0.02, 0.008), diffuse=(0.1, 0.1, 0.12))],
    )
    group = build_node("Group", children=[body, cab, stack])
    return _file_scene("Train Engine", [group])


def train_car_scene(density: int) -> tuple:
    points, index = prism_mesh(CAR_LENGTH, CAR_HEIGHT, CAR_WIDTH, density)
    body = mesh_shape(points, index, diffuse=(0.45, 0.2, 0.16))
    roof = build_node(
        "Transform",
        translation=(-CAR_LENGTH / 2, CAR_HEIGHT + 0.003, 0.0),
        children=[box_shape((CAR_LENGTH * 0.96, 0.006, CAR_WIDTH * 0.96), diffuse=(0.5, 0.26, 0.2))],
    )
    group = build_node("Group", children=[body, roof])
    return _file_scene("Train Car", [group])


def station_scene(density: int) -> tuple:
    points, index = prism_mesh(0.24, 0.09, 0.12, density)
    hall = mesh_shape(points, index, diffuse=(0.75, 0.68, 0.55))
    # the hull spans x in [-0.24, 0]; recenter so the station sits on its pad
    hall_t = build_node("Transform", translation=(0.12, 0.0, 0.0), children=[hall])
    roof = build_node(
        "Transform",
        translation=(0.0, 0.1, 0.0),
        children=[box_shape((0.26, 0.012, 0.14), diffuse=(0.4, 0.28, 0.22))],
    )
    platform = build_node(
        "Transform",
        translation=(0.0, 0.008, -0.1),
        children=[
            box_shape(
                (0.3, 0.016, 0.06),
                diffuse=(0.6, 0.6, 0.62),
                texture_url="textures/platform.png",
            )
        ],
    )
    group = build_node("Group", children=[hall_t, roof, platform])
    return _file_scene("Train Station", [group])


def backdrop_scene() -> tuple:
    quad = build_node(
        "Transform",
        translation=(0.0, 0.4, -0.9),
        children=[box_shape((1.2, 0.8, 0.01), diffuse=(1.0, 1.0, 1.0))],
    )
    group = build_node("Group", children=[quad])
    return _file_scene("White Rectangle Backdrop", [group])
