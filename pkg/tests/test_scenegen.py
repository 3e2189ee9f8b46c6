import math

import pytest

from scenery.scene import (
    Node,
    NodeKind,
    Vec3,
    build_node,
    scene_stats,
    validate,
    walk_scene,
)
from scenery.scene.schema import get_field
from scenery.scenegen import (
    GenParams,
    bundle_resolver,
    generate_bundle,
    generate_composite,
    generate_georgia,
    generate_savannah,
)
from scenery.binarycodec import decode_binary, encode_binary
from scenery.xmlcodec import parse_xml, semantic_equal, serialize_xml


def _nodes(scene, kind):
    return [n for n, _ in walk_scene(scene) if isinstance(n, Node) and n.kind is kind]


def _animated_defs(scene):
    """Viewpoints whose position or orientation is a route target."""
    targets = set()
    for r in scene.routes:
        if r.to_field in ("set_position", "set_orientation", "position", "orientation"):
            targets.add(r.to_node)
    return targets


def test_params_validation():
    with pytest.raises(ValueError):
        GenParams(car_count=0)
    with pytest.raises(ValueError):
        GenParams(building_count=-1)
    with pytest.raises(ValueError):
        GenParams(mesh_density=2)
    with pytest.raises(ValueError):
        generate_composite(GenParams(savannah_offset=Vec3(0, -50, 0)))


def test_georgia_manifest_viewpoints():
    scene, manifest = generate_georgia(GenParams())
    assert len(manifest.viewpoints) == 4
    assert manifest.static_viewpoint_count == 1
    assert manifest.animated_viewpoint_count == 3


def test_georgia_three_nested_orientation_interpolators():
    scene, manifest = generate_georgia(GenParams(car_count=2))
    sections = [
        n
        for n in _nodes(scene, NodeKind.OrientationInterpolator)
        if n.def_name and n.def_name.startswith("TrainSec")
    ]
    assert len(sections) == 3
    # and the sections nest: TrainSec1 lives inside TrainSec0's children
    by_name = {n.def_name: n for n, _ in walk_scene(scene) if isinstance(n, Node) and n.def_name}
    sec0, sec1 = by_name["TrainSec0"], by_name["TrainSec1"]
    assert any(getattr(c, "def_name", None) == "TrainSec1" for c in sec0.children)
    assert any(getattr(c, "def_name", None) == "TrainSec2" for c in sec1.children)


def test_georgia_car_count_scales_sections():
    scene, manifest = generate_georgia(GenParams(car_count=4))
    sections = [
        n
        for n in _nodes(scene, NodeKind.OrientationInterpolator)
        if n.def_name.startswith("TrainSec")
    ]
    assert len(sections) == 5
    assert len(manifest.couplings) == 4


def test_debug_camera_cube_adds_red_box():
    plain, _ = generate_georgia(GenParams())
    cubed, _ = generate_georgia(GenParams(include_debug_camera_cube=True))
    assert len(_nodes(cubed, NodeKind.Shape)) == len(_nodes(plain, NodeKind.Shape)) + 1
    marker = [
        n for n, _ in walk_scene(cubed)
        if isinstance(n, Node) and n.def_name == "MovingCamMarker"
    ]
    assert marker
    shape = marker[0].children[0]
    mat = shape.fields["appearance"].fields["material"]
    assert get_field(mat, "diffuseColor").as_tuple() == (1.0, 0.0, 0.0)
    # and it is driven by the moving-camera interpolator
    assert any(
        r.from_node == "MovingCamPos" and r.to_node == "MovingCamMarker"
        for r in cubed.routes
    )


def test_both_trigger_paths_converge_on_the_shared_timer():
    scene, _ = generate_georgia(GenParams())
    starts = [
        r.from_node
        for r in scene.routes
        if r.to_node == "TrainPathTimer" and r.to_field == "set_startTime"
    ]
    assert sorted(starts) == ["MenuTrainTouch", "TrainTouch"]


def test_all_non_spotlight_animations_share_one_timer():
    scene, _ = generate_georgia(GenParams())
    drivers = {
        r.from_node
        for r in scene.routes
        if r.to_field == "set_fraction"
    }
    assert drivers == {"TrainPathTimer", "SunTimer"}
    sun_fed = {
        r.to_node for r in scene.routes if r.from_node == "SunTimer"
    }
    assert sun_fed == {"SunColor"}


def test_spotlight_cycle_is_twelve_seconds_yellow_white_yellow():
    scene, _ = generate_georgia(GenParams())
    sun = next(n for n in _nodes(scene, NodeKind.TimeSensor) if n.def_name == "SunTimer")
    assert get_field(sun, "cycleInterval") == 12.0
    assert get_field(sun, "loop") is True
    ci = next(n for n in _nodes(scene, NodeKind.ColorInterpolator))
    assert ci.fields["key"] == (0.0, 0.5, 1.0)
    cols = [c.as_tuple() for c in ci.fields["keyValue"]]
    assert cols == [(1.0, 1.0, 0.0), (1.0, 1.0, 1.0), (1.0, 1.0, 0.0)]


def test_savannah_manifest_viewpoints():
    scene, manifest = generate_savannah(GenParams())
    assert len(manifest.viewpoints) == 5
    assert manifest.static_viewpoint_count == 3
    assert manifest.animated_viewpoint_count == 2


def test_incoming_train_decelerates_outgoing_accelerates():
    scene, _ = generate_savannah(GenParams())
    nodes = {n.def_name: n for n in _nodes(scene, NodeKind.PositionInterpolator)}

    def span_speeds(node):
        keys = get_field(node, "key")
        kv = get_field(node, "keyValue")
        return [
            (kv[i + 1] - kv[i]).norm() / (keys[i + 1] - keys[i])
            for i in range(len(keys) - 1)
        ]

    incoming = span_speeds(nodes["InTrainPos"])
    assert all(b < a for a, b in zip(incoming[-3:], incoming[-2:]))
    assert all(b < a for a, b in zip(incoming, incoming[1:]))  # strictly decreasing
    outgoing = span_speeds(nodes["OutTrainPos"])
    assert all(b > a for a, b in zip(outgoing, outgoing[1:]))  # strictly increasing
    # displacement strictly monotone along the track
    xs = [v.x for v in get_field(nodes["InTrainPos"], "keyValue")]
    assert all(b < a for a, b in zip(xs, xs[1:]))


def test_savannah_zero_buildings_still_valid():
    scene, manifest = generate_savannah(GenParams(building_count=0))
    assert validate(scene).ok
    names = [n.def_name for n, _ in walk_scene(scene) if isinstance(n, Node) and n.def_name]
    assert "SvStationGroup" in names and "SvInTrain" in names and "SvOutTrain" in names


def test_savannah_has_ambient_audio_clip():
    scene, _ = generate_savannah(GenParams())
    clips = _nodes(scene, NodeKind.AudioClip)
    assert len(clips) == 1
    assert get_field(clips[0], "loop") is True
    assert get_field(clips[0], "url")[0].endswith(".wav")


def test_composite_inventory_matches_reference_table(composite_bundle):
    _, manifest = composite_bundle
    assert len(manifest.viewpoints) == 9
    assert manifest.static_viewpoint_count == 4
    assert manifest.animated_viewpoint_count == 5
    expected = {
        "GeorgiaOverhead": False,
        "GeorgiaGroundLevel": True,
        "GeorgiaEngineLevel": True,
        "GeorgiaMovingCamera": True,
        "SavannahOverhead": False,
        "SavannahGroundLevel": False,
        "SavannahTrainStation": False,
        "SavannahIncomingTrain": True,
        "SavannahOutgoingTrain": True,
    }
    assert dict(manifest.viewpoints) == expected


def test_animated_classification_derivable_from_routes(composite_bundle):
    files, manifest = composite_bundle
    from scenery.runtime import expand_inlines

    flat = expand_inlines(files["Georgia.x3d"], bundle_resolver(files))
    animated = _animated_defs(flat)
    for name, is_animated in manifest.viewpoints:
        assert (name in animated) == is_animated, name


def test_composite_emits_five_files(composite_bundle):
    files, manifest = composite_bundle
    assert sorted(files) == [
        "Georgia.x3d",
        "Savannah.x3d",
        "Station.x3d",
        "TrainCar.x3d",
        "TrainEngine.x3d",
    ]
    assert len(manifest.files) == 5


def test_optional_sixth_debug_backdrop():
    files, manifest = generate_bundle(
        "composite", GenParams(include_debug_backdrop=True)
    )
    assert "WhiteRectangleBackdrop.x3d" in files
    assert len(manifest.files) == 6


def test_every_generated_scene_validates_clean(composite_bundle):
    files, _ = composite_bundle
    for name, scene in files.items():
        assert validate(scene).ok, name


def test_manifest_stats_match_scene_stats_exactly(composite_bundle):
    files, manifest = composite_bundle
    stats = scene_stats(files["Georgia.x3d"], bundle_resolver(files))
    assert stats == manifest.stats or (
        stats.shape_count == manifest.stats.shape_count
        and stats.node_count_by_kind == manifest.stats.node_count_by_kind
    )


def test_coupling_centers_match_scene_fields(composite_bundle):
    files, manifest = composite_bundle
    by_name = {
        n.def_name: n
        for n, _ in walk_scene(files["Georgia.x3d"])
        if isinstance(n, Node) and n.def_name
    }
    for parent, child, center in manifest.couplings:
        node = by_name[child]
        assert get_field(node, "center").as_tuple() == center
        # the child section nests inside the parent section
        parent_children = [getattr(c, "def_name", None) for c in by_name[parent].children]
        assert child in parent_children


def test_bundle_round_trips_through_both_codecs(composite_bundle):
    files, _ = composite_bundle
    for name, scene in files.items():
        data = serialize_xml(scene)
        assert semantic_equal(scene, parse_xml(data)), name
        assert semantic_equal(scene, decode_binary(encode_binary(scene))), name


def test_manifest_stats_match_with_debug_flags():
    p = GenParams(
        car_count=3,
        building_count=7,
        mesh_density=64,
        include_debug_backdrop=True,
        include_debug_camera_cube=True,
    )
    files, manifest = generate_bundle("composite", p)
    stats = scene_stats(files["Georgia.x3d"], bundle_resolver(files))
    assert stats.node_count_by_kind == manifest.stats.node_count_by_kind
    assert stats.shape_count == manifest.stats.shape_count
    assert stats.inline_count == manifest.stats.inline_count


def test_bench_corpus_hits_size_windows(bench_corpus):
    labels = [a.label for a in bench_corpus]
    assert labels == [
        "Georgia Scene",
        "Savannah Scene",
        "Train Station",
        "Train Engine",
        "Train Car",
    ]
    for art in bench_corpus:
        assert art.within_window, f"{art.label}: {art.xml_bytes} vs {art.target_bytes}"
        assert validate(art.scene).ok, art.label


def test_bench_corpus_round_trips(bench_corpus):
    for art in bench_corpus:
        data = serialize_xml(art.scene)
        assert semantic_equal(art.scene, parse_xml(data)), art.label
        assert semantic_equal(art.scene, decode_binary(encode_binary(art.scene))), art.label
