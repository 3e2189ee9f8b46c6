import math

import numpy as np
import pytest

from scenery.runtime import (
    SimConfig,
    SimEvent,
    Simulation,
    SimulationError,
    ViewerPose,
    expand_inlines,
    parse_script,
    render_trace,
    run_summary,
    track_from_node,
    interpolate_position,
)
from scenery.runtime.inline import InlineCollisionError
from scenery.scene import Rotation, Route, SceneGraph, Vec3, build_node
from scenery.scene.stats import dict_resolver


def _touch_train_scene():
    return SceneGraph(
        roots=(
            build_node("Viewpoint", def_name="Cam", position=(0, 0, 5)),
            build_node(
                "Transform",
                def_name="TrainBody",
                children=[
                    build_node("TouchSensor", def_name="TrainTouch"),
                    build_node("Shape", geometry=build_node("Box")),
                ],
            ),
            build_node(
                "TimeSensor", def_name="Timer", cycleInterval=12.0, startTime=-1000.0
            ),
            build_node(
                "PositionInterpolator",
                def_name="PI",
                key=(0.0, 1.0),
                keyValue=((0, 0, 0), (10, 0, 0)),
            ),
        ),
        routes=(
            Route("TrainTouch", "touchTime", "Timer", "set_startTime"),
            Route("Timer", "fraction_changed", "PI", "set_fraction"),
            Route("PI", "value_changed", "TrainBody", "set_translation"),
        ),
    )


def test_touch_sets_start_time_and_drives_interpolation():
    sim = Simulation(_touch_train_scene())
    sim.step_to(1.0, [SimEvent(at=1.0, kind="touch", node="TrainBody")])
    assert sim.timers["Timer"].start_time == 1.0
    sim.step_to(7.0)  # half of the 12 s cycle after the touch
    track = track_from_node(sim.defs["PI"])
    assert sim.get_live("TrainBody", "translation") == interpolate_position(track, 0.5)


def test_touch_on_sensor_def_directly():
    sim = Simulation(_touch_train_scene())
    sim.step_to(2.0, [SimEvent(at=2.0, kind="touch", node="TrainTouch")])
    assert sim.timers["Timer"].start_time == 2.0


def test_touch_unknown_node_raises():
    sim = Simulation(_touch_train_scene())
    with pytest.raises(SimulationError):
        sim.step_to(1.0, [SimEvent(at=1.0, kind="touch", node="Ghost")])


def test_out_of_order_script_rejected():
    sim = Simulation(_touch_train_scene())
    with pytest.raises(SimulationError):
        sim.step_to(
            5.0,
            [
                SimEvent(at=3.0, kind="advance_only"),
                SimEvent(at=2.0, kind="advance_only"),
            ],
        )
    with pytest.raises(SimulationError):
        sim.step_to(1.0, [SimEvent(at=9.0, kind="advance_only")])


def test_reset_returns_train_to_initial_pose():
    sim = Simulation(_touch_train_scene())
    sim.step_to(1.0, [SimEvent(at=1.0, kind="touch", node="TrainBody")])
    sim.step_to(4.0)
    assert sim.get_live("TrainBody", "translation") != Vec3(0, 0, 0)
    recs = sim.step_to(5.0, [SimEvent(at=5.0, kind="reset")])
    assert sim.get_live("TrainBody", "translation") == Vec3(0, 0, 0)
    frac_zero = [r for r in recs if r.source == "Timer.fraction_changed" and r.value == 0.0]
    assert frac_zero
    # the timer is stopped afterwards
    sim.step_to(6.0)
    assert not sim.timers["Timer"].is_active


def test_reset_spares_free_running_loops():
    scene = SceneGraph(
        roots=(
            build_node("TimeSensor", def_name="Sun", cycleInterval=12.0, loop=True),
            build_node(
                "ColorInterpolator",
                def_name="CI",
                key=(0.0, 0.5, 1.0),
                keyValue=((1, 1, 0), (1, 1, 1), (1, 1, 0)),
            ),
            build_node("SpotLight", def_name="Spot"),
        ),
        routes=(
            Route("Sun", "fraction_changed", "CI", "set_fraction"),
            Route("CI", "value_changed", "Spot", "set_color"),
        ),
    )
    sim = Simulation(scene)
    sim.step_to(1.0, [SimEvent(at=0.5, kind="reset")])
    assert sim.timers["Sun"].is_active  # no incoming startTime route: untouched


def test_non_loop_terminal_emission_exactly_one():
    sim = Simulation(_touch_train_scene())
    sim.step_to(1.0, [SimEvent(at=1.0, kind="touch", node="TrainBody")])
    recs = sim.step_to(14.0)
    terminal = [
        r for r in recs if r.source == "Timer.fraction_changed" and r.value == 1.0
    ]
    assert len(terminal) == 1
    assert sim.get_live("TrainBody", "translation") == Vec3(10, 0, 0)


def test_cyclic_routes_terminate_each_fires_once():
    scene = SceneGraph(
        roots=(
            build_node("TouchSensor", def_name="Kick"),
            build_node("TimeSensor", def_name="A", cycleInterval=5.0, startTime=-99.0),
            build_node("TimeSensor", def_name="B", cycleInterval=5.0, startTime=-99.0),
        ),
        routes=(
            Route("Kick", "touchTime", "A", "set_startTime"),
            Route("A", "startTime_changed", "B", "set_startTime"),
            Route("B", "startTime_changed", "A", "set_startTime"),
        ),
    )
    sim = Simulation(scene)
    recs = sim.step_to(0.5, [SimEvent(at=0.25, kind="touch", node="Kick")])
    at_kick = [r for r in recs if r.at == 0.25]
    a_changes = [r for r in at_kick if r.source == "A.startTime"]
    b_changes = [r for r in at_kick if r.source == "B.startTime"]
    assert len(a_changes) == 2  # touch delivery + the cycle coming back once
    assert len(b_changes) == 1
    assert sim.timers["A"].start_time == 0.25
    assert sim.timers["B"].start_time == 0.25


def test_determinism_byte_identical_traces():
    script = [
        SimEvent(at=1.0, kind="touch", node="TrainBody"),
        SimEvent(at=5.0, kind="reset"),
    ]
    outs = []
    for _ in range(2):
        sim = Simulation(_touch_train_scene())
        recs = sim.step_to(8.0, list(script))
        outs.append(render_trace(recs, run_summary(sim, recs)))
    assert outs[0] == outs[1]


def _two_viewpoint_scene():
    return SceneGraph(
        roots=(
            build_node("Viewpoint", def_name="A", position=(0, 0, 0)),
            build_node(
                "Viewpoint",
                def_name="B",
                position=(10, 0, 0),
                orientation=(0, 1, 0, math.pi / 2),
            ),
        )
    )


def test_bind_already_bound_is_silent_noop():
    sim = Simulation(_two_viewpoint_scene())
    sim.step_to(0.5)
    recs = sim.bind_viewpoint("A", 1.0)
    assert [r for r in recs if "isBound" in r.source] == []


def test_bind_transition_midpoint():
    sim = Simulation(_two_viewpoint_scene(), SimConfig(transition_duration=2.0))
    sim.bind_viewpoint("B", 1.0)
    pose = sim.effective_pose(2.0)  # halfway through the 2 s transition
    assert (pose.position - Vec3(5, 0, 0)).norm() < 1e-9
    assert abs(pose.orientation.angle - math.pi / 4) < 1e-9
    sim.step_to(4.0)
    assert (sim.viewer.position - Vec3(10, 0, 0)).norm() < 1e-9


def test_rebind_mid_transition_continues_from_current_pose():
    sim = Simulation(_two_viewpoint_scene(), SimConfig(transition_duration=2.0))
    sim.bind_viewpoint("B", 1.0)
    sim.step_to(2.0)  # halfway: viewer near (5,0,0)
    sim.step_to(2.5, [SimEvent(at=2.5, kind="bind_viewpoint", viewpoint="A")])
    assert sim.transition is not None
    start = sim.transition.from_pose.position
    assert (start - sim.effective_pose(2.5).position).norm() < 1e-6
    assert start.x > 1.0  # no snap back to A before transitioning


def test_bind_unknown_viewpoint_raises():
    sim = Simulation(_two_viewpoint_scene())
    with pytest.raises(SimulationError):
        sim.step_to(1.0, [SimEvent(at=1.0, kind="bind_viewpoint", viewpoint="Zed")])


def test_first_viewpoint_bound_at_start():
    sim = Simulation(_two_viewpoint_scene())
    assert sim.bind_stack == ["A"]
    assert sim.viewer.position == Vec3(0, 0, 0)


def test_set_viewer_pose_goes_manual_and_cancels_transition():
    sim = Simulation(_two_viewpoint_scene(), SimConfig(transition_duration=2.0))
    sim.bind_viewpoint("B", 1.0)
    pose = ViewerPose(Vec3(7, 7, 7), Rotation(Vec3(0, 1, 0), 0.5))
    sim.step_to(1.5, [SimEvent(at=1.5, kind="set_viewer_pose", pose=pose)])
    assert sim.transition is None
    assert sim.viewer == pose
    sim.step_to(5.0)
    assert sim.viewer == pose  # stays manual


def test_invalid_scene_rejected_at_load():
    bad = SceneGraph(
        roots=(build_node("Group", def_name="X"), build_node("Group", def_name="X"))
    )
    with pytest.raises(SimulationError):
        Simulation(bad)


def test_inline_expansion_merges_routes_and_defs():
    inner = SceneGraph(
        roots=(
            build_node("TimeSensor", def_name="InnerTimer", cycleInterval=4.0, loop=True),
            build_node(
                "PositionInterpolator",
                def_name="InnerPI",
                key=(0.0, 1.0),
                keyValue=((0, 0, 0), (1, 1, 1)),
            ),
            build_node("Transform", def_name="InnerT"),
        ),
        routes=(
            Route("InnerTimer", "fraction_changed", "InnerPI", "set_fraction"),
            Route("InnerPI", "value_changed", "InnerT", "set_translation"),
        ),
    )
    outer = SceneGraph(
        roots=(
            build_node(
                "Transform",
                def_name="Anchor",
                translation=(0, -500, 0),
                children=[build_node("Inline", def_name="Sub", url=("inner.x3d",))],
            ),
        )
    )
    sim = Simulation(outer, resolver=dict_resolver({"inner.x3d": inner}))
    sim.step_to(1.0)
    assert sim.get_live("InnerT", "translation") != Vec3(0, 0, 0)
    world = sim.world_matrix("InnerT")
    assert world[1, 3] < -499.0  # inline content inherits the anchor offset


def test_inline_collision_rejected():
    inner = SceneGraph(roots=(build_node("Group", def_name="Dup"),))
    outer = SceneGraph(
        roots=(
            build_node("Group", def_name="Dup"),
            build_node("Inline", url=("inner.x3d",)),
        )
    )
    with pytest.raises(InlineCollisionError):
        expand_inlines(outer, dict_resolver({"inner.x3d": inner}))


def test_script_parsing_wire_format():
    text = (
        '{"at":1.0,"kind":"touch","node":"TrainBody"}\n'
        "\n"
        '{"at":2.0,"kind":"bind_viewpoint","viewpoint":"Cam"}\n'
        '{"at":3.0,"kind":"set_viewer_pose","position":[1,2,3],'
        '"orientation":[0,1,0,0.5]}\n'
        '{"at":4.0,"kind":"reset"}\n'
    )
    events = parse_script(text)
    assert [e.kind for e in events] == ["touch", "bind_viewpoint", "set_viewer_pose", "reset"]
    assert events[0].node == "TrainBody"
    assert events[2].pose.position == Vec3(1, 2, 3)


def test_trace_records_strictly_ordered():
    sim = Simulation(_touch_train_scene())
    recs = sim.step_to(3.0, [SimEvent(at=1.0, kind="touch", node="TrainBody")])
    keys = [(r.at, r.cascade_seq) for r in recs]
    assert keys == sorted(keys)
    assert len(set(keys)) == len(keys)  # strict: no duplicate (at, seq)


def test_changes_verbosity_suppresses_repeats():
    scene = SceneGraph(
        roots=(
            build_node("TimeSensor", def_name="T", cycleInterval=5.0, loop=True),
            build_node(
                "PositionInterpolator",
                def_name="P",
                key=(0.0, 1.0),
                keyValue=((0, 0, 0), (0, 0, 0)),  # constant output
            ),
        ),
        routes=(Route("T", "fraction_changed", "P", "set_fraction"),),
    )
    full = Simulation(scene, SimConfig(verbosity="full"))
    f_recs = [r for r in full.step_to(1.0) if r.source == "P.value_changed"]
    compact = Simulation(scene, SimConfig(verbosity="changes"))
    c_recs = [r for r in compact.step_to(1.0) if r.source == "P.value_changed"]
    assert len(f_recs) > 1
    assert len(c_recs) == 1
