import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from randscenes import random_scene
from scenery.scene import (
    Node,
    NodeKind,
    PromotionError,
    Route,
    SceneGraph,
    UseRef,
    build_node,
    promote_static_groups,
    scene_stats,
    validate,
    walk_scene,
)
from scenery.xmlcodec import serialize_xml


def _kinds(scene, kind):
    return [
        n.def_name or "?"
        for n, _ in walk_scene(scene)
        if isinstance(n, Node) and n.kind is kind
    ]


def _shape():
    return build_node("Shape", geometry=build_node("Box"))


def test_plain_shape_group_is_promoted():
    s = SceneGraph(roots=(build_node("Group", children=[_shape(), _shape()]),))
    out = promote_static_groups(s)
    assert out.roots[0].kind is NodeKind.StaticGroup


def test_group_with_touch_sensor_unchanged():
    s = SceneGraph(
        roots=(build_node("Group", children=[_shape(), build_node("TouchSensor")]),)
    )
    out = promote_static_groups(s)
    assert out.roots[0].kind is NodeKind.Group


def test_group_with_viewpoint_unchanged():
    s = SceneGraph(
        roots=(build_node("Group", children=[build_node("Viewpoint", def_name="V")]),)
    )
    assert promote_static_groups(s).roots[0].kind is NodeKind.Group


def test_route_referenced_def_blocks_promotion():
    s = SceneGraph(
        roots=(
            build_node("Group", children=[build_node("Transform", def_name="T")]),
            build_node(
                "PositionInterpolator", def_name="PI", key=(0.0,), keyValue=((0, 0, 0),)
            ),
        ),
        routes=(Route("PI", "value_changed", "T", "set_translation"),),
    )
    out = promote_static_groups(s)
    assert out.roots[0].kind is NodeKind.Group


def test_external_use_blocks_promotion():
    shape = build_node("Shape", def_name="S", geometry=build_node("Box"))
    s = SceneGraph(
        roots=(
            build_node("Group", children=[shape]),
            build_node("Group", children=[UseRef("S")]),
        )
    )
    out = promote_static_groups(s)
    # first group leaks S outside; second aliases static content only
    assert out.roots[0].kind is NodeKind.Group
    assert out.roots[1].kind is NodeKind.StaticGroup


def test_internal_use_is_fine():
    shape = build_node("Shape", def_name="S", geometry=build_node("Box"))
    s = SceneGraph(roots=(build_node("Group", children=[shape, UseRef("S")]),))
    assert promote_static_groups(s).roots[0].kind is NodeKind.StaticGroup


def test_refuses_invalid_scene():
    bad = SceneGraph(
        roots=(build_node("Group", def_name="X"), build_node("Group", def_name="X"))
    )
    with pytest.raises(PromotionError):
        promote_static_groups(bad)


def test_georgia_promotes_exactly_the_map_group(composite_bundle):
    files, _ = composite_bundle
    from scenery.scenegen import GenParams, generate_georgia

    scene, _ = generate_georgia(GenParams())
    promoted = promote_static_groups(scene)
    statics = _kinds(promoted, NodeKind.StaticGroup)
    assert statics == ["GeorgiaMap"]
    # train subtree untouched: it is route-targeted
    train = [
        n
        for n, _ in walk_scene(promoted)
        if isinstance(n, Node) and n.def_name == "TrainBody"
    ]
    assert train and train[0].kind is NodeKind.Transform
    assert validate(promoted).ok


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=0, max_value=10_000))
def test_promotion_properties_on_random_scenes(seed):
    s = random_scene(seed)
    out = promote_static_groups(s)
    # revalidates clean
    assert validate(out).ok
    # idempotent
    again = promote_static_groups(out)
    assert serialize_xml(again) == serialize_xml(out)
    # stats invariant modulo the Group/StaticGroup relabel
    before = scene_stats(s)
    after = scene_stats(out)
    assert before.shape_count == after.shape_count
    assert before.image_texture_count == after.image_texture_count
    assert before.audio_clip_count == after.audio_clip_count
    assert before.inline_count == after.inline_count
    merge = lambda d: {
        **{k: v for k, v in d.items() if k not in ("Group", "StaticGroup")},
        "Group|StaticGroup": d.get("Group", 0) + d.get("StaticGroup", 0),
    }
    assert merge(before.node_count_by_kind) == merge(after.node_count_by_kind)
