import math
import random

import numpy as np
import pytest

from scenery.scene import SceneGraph, UnknownPathError, Vec3, build_node, world_transform
from scenery.scene.transform import apply_to_point, node_local_matrix


def _scene(*roots):
    return SceneGraph(roots=roots)


def test_no_transform_ancestors_is_identity():
    s = _scene(build_node("Group", children=[build_node("Shape", def_name="S")]))
    assert np.allclose(world_transform(s, "S"), np.eye(4))


def test_single_translation():
    s = _scene(
        build_node(
            "Transform",
            translation=(0, -500, 0),
            children=[build_node("Shape", def_name="S")],
        )
    )
    m = world_transform(s, "S")
    assert np.allclose(m[:3, 3], [0, -500, 0])


def test_rotation_then_translation_composes():
    # 90 degrees about Z, then a nested translation along x: origin -> (0,1,0)
    s = _scene(
        build_node(
            "Transform",
            rotation=(0, 0, 1, math.pi / 2),
            children=[
                build_node(
                    "Transform",
                    translation=(1, 0, 0),
                    children=[build_node("Shape", def_name="S")],
                )
            ],
        )
    )
    p = apply_to_point(world_transform(s, "S"), Vec3(0, 0, 0))
    assert abs(p.x) < 1e-9 and abs(p.y - 1) < 1e-9 and abs(p.z) < 1e-9


def test_center_pivot():
    # rotating about a center keeps the center fixed
    c = Vec3(2, 0, 0)
    s = _scene(
        build_node(
            "Transform",
            def_name="T",
            center=c.as_tuple(),
            rotation=(0, 1, 0, 1.1),
        )
    )
    p = apply_to_point(world_transform(s, "T"), c)
    assert (p - c).norm() < 1e-12


def test_unknown_path_raises():
    s = _scene(build_node("Group"))
    with pytest.raises(UnknownPathError):
        world_transform(s, "Nope")
    with pytest.raises(UnknownPathError):
        world_transform(s, (0, 5))


def test_index_path_and_field_steps():
    s = _scene(
        build_node(
            "Transform",
            translation=(1, 2, 3),
            children=[
                build_node("Shape", geometry=build_node("Box"))
            ],
        )
    )
    m = world_transform(s, (0, 0, "geometry"))
    assert np.allclose(m[:3, 3], [1, 2, 3])


def test_parent_child_composition_randomized():
    """world(child) == world(parent) @ local(child) over 1,000 random chains."""
    rng = random.Random(20240315)

    def rand_transform(children):
        axis = (rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(0.1, 1))
        return build_node(
            "Transform",
            translation=(rng.uniform(-9, 9), rng.uniform(-9, 9), rng.uniform(-9, 9)),
            rotation=(*axis, rng.uniform(-3, 3)),
            scale=(rng.uniform(0.2, 3), rng.uniform(0.2, 3), rng.uniform(0.2, 3)),
            scaleOrientation=(*axis, rng.uniform(-1, 1)),
            center=(rng.uniform(-2, 2), rng.uniform(-2, 2), rng.uniform(-2, 2)),
            children=children,
        )

    for trial in range(1000):
        child = rand_transform([build_node("Shape", def_name="S")])
        chain = child
        depth = rng.randint(0, 4)
        for _ in range(depth):
            chain = rand_transform([chain])
        s = _scene(chain)

        child_path = (0,) + (0,) * depth
        parent_m = np.eye(4)
        if depth:
            parent_m = world_transform(s, (0,) + (0,) * (depth - 1))
        composed = parent_m @ node_local_matrix(child)
        direct = world_transform(s, child_path)
        assert np.max(np.abs(composed - direct)) < 1e-9, f"trial {trial}"
