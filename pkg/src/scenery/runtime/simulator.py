"""Deterministic, headless execution of the event model.

Time advances on a fixed sampling grid (k / sample_rate, default 30 Hz);
injected events are processed at their exact timestamps between ticks,
events before the tick when they coincide.  Within one timestamp the
cascade runs to fixpoint with loop-breaking: each route delivers at most
once per timestamp, deliveries are FIFO in route declaration order.  The
trace is a pure function of (scene, script, config); nothing here reads a
clock, RNG, or iteration order that is not document order.

Per timestamp the phases are: injected events, sensor sampling (active
TimeSensors -> interpolators -> target fields), viewer update (transition
sampling or bound-viewpoint attachment), proximity sensors, LOD selection.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np

from ..scene.schema import get_field, resolve_route_field
from ..scene.stats import InlineResolver, null_resolver
from ..scene.transform import (
    apply_to_point,
    identity,
    local_matrix,
    rotation_matrix,
)
from ..scene.types import Node, NodeKind, Rotation, SceneGraph, Vec3, walk_scene
from ..scene.validate import validate
from .inline import expand_inlines
from .interpolators import (
    KeyframeTrack,
    interpolate_color,
    interpolate_orientation,
    interpolate_position,
    track_from_node,
)
from .lod import select_lod_child
from .model import SimConfig, SimEvent, TraceRecord, ViewerPose
from .proximity import evaluate_proximity
from .rotations import quat_from_rotation, quat_slerp, rotation_from_matrix3, rotation_from_quat
from .timesensor import TimeSensorState, timesensor_fraction


class SimulationError(ValueError):
    pass


_INTERPOLATE = {
    NodeKind.PositionInterpolator: interpolate_position,
    NodeKind.OrientationInterpolator: interpolate_orientation,
    NodeKind.ColorInterpolator: interpolate_color,
}

# inputOutput Transform fields that invalidate world matrices when routed to
_TRANSFORM_FIELDS = {"translation", "rotation", "scale", "scaleOrientation", "center"}


@dataclass
class _RouteInfo:
    index: int
    from_node: str
    out_field: str  # canonical
    to_node: str
    in_field: str  # canonical


@dataclass
class _Transition:
    from_pose: ViewerPose
    to_pose: ViewerPose
    t0: float
    duration: float


class Simulation:
    """Owns one run's mutable state; the input scene is shared immutably."""

    def __init__(
        self,
        scene: SceneGraph,
        config: SimConfig = SimConfig(),
        resolver: InlineResolver = null_resolver,
    ):
        self.config = config
        self.scene = expand_inlines(scene, resolver)
        report = validate(self.scene)
        if not report.ok:
            raise SimulationError(
                f"scene fails validation: {report.errors[0].code} {report.errors[0].message}"
            )

        self.defs: dict[str, Node] = {}
        self.paths: dict[str, tuple] = {}
        self.doc_order: list[str] = []
        for item, path in walk_scene(self.scene):
            if isinstance(item, Node) and item.def_name and item.def_name not in self.defs:
                self.defs[item.def_name] = item
                self.paths[item.def_name] = path
                self.doc_order.append(item.def_name)

        self.routes: list[_RouteInfo] = []
        self.routes_by_source: dict[tuple, list[int]] = {}
        for i, route in enumerate(self.scene.routes):
            src = self.defs[route.from_node]
            dst = self.defs[route.to_node]
            out = resolve_route_field(src.kind, route.from_field, "out")
            into = resolve_route_field(dst.kind, route.to_field, "in")
            info = _RouteInfo(i, route.from_node, out[0], route.to_node, into[0])
            self.routes.append(info)
            self.routes_by_source.setdefault((info.from_node, info.out_field), []).append(i)

        self.live: dict[tuple, object] = {}
        self.timers: dict[str, TimeSensorState] = {}
        self._terminal_sent: set[str] = set()
        self.tracks: dict[str, KeyframeTrack] = {}
        self.prox_prev: dict[str, ViewerPose | None] = {}
        self.viewpoints: list[str] = []
        self._lods: list[tuple] = []  # (def_name | None, path, node)
        self._lod_state: dict[tuple, int | None] = {}

        for item, path in walk_scene(self.scene):
            if not isinstance(item, Node):
                continue
            name = item.def_name
            if item.kind is NodeKind.TimeSensor and name:
                self.timers[name] = TimeSensorState.from_node(item)
            elif item.kind in _INTERPOLATE and name:
                try:
                    self.tracks[name] = track_from_node(item)
                except ValueError as exc:
                    raise SimulationError(f"{name}: {exc}") from exc
            elif item.kind is NodeKind.ProximitySensor and name:
                self.prox_prev[name] = None
            elif item.kind is NodeKind.Viewpoint and name:
                self.viewpoints.append(name)
            elif item.kind is NodeKind.LOD:
                key = path
                self._lods.append((name, path, item))
                self._lod_state[key] = None

        # Viewer state: the first viewpoint in document order starts bound.
        self.bind_stack: list[str] = [self.viewpoints[0]] if self.viewpoints else []
        self.viewer_mode = "attached" if self.bind_stack else "manual"
        self.manual_pose = ViewerPose(Vec3(0, 0, 10), Rotation(Vec3(0, 0, 1), 0.0))
        self.transition: _Transition | None = None
        self.viewer = self._viewpoint_world_pose(self.bind_stack[-1]) if self.bind_stack else self.manual_pose

        self.now = 0.0
        self._next_tick_k = 0
        self._processed_through = float("-inf")
        self._tau = None
        self._fired: set[int] = set()
        self._queue: deque = deque()
        self._seq = 0
        self._trace: list[TraceRecord] = []
        self._last_traced: dict[str, object] = {}

    # ------------------------------------------------------------------
    # Live field access and world matrices.

    def get_live(self, name: str, fieldname: str):
        key = (name, fieldname)
        if key in self.live:
            return self.live[key]
        return get_field(self.defs[name], fieldname)

    def _node_live_local(self, node: Node) -> np.ndarray:
        if node.kind is not NodeKind.Transform:
            return identity()
        if node.def_name:
            g = lambda f: self.get_live(node.def_name, f)
        else:
            g = lambda f: get_field(node, f)
        return local_matrix(
            g("translation"), g("rotation"), g("scale"), g("scaleOrientation"), g("center")
        )

    def world_matrix(self, target) -> np.ndarray:
        """World matrix for a DEF name or index path, using live fields."""
        if isinstance(target, str):
            if target not in self.paths:
                raise SimulationError(f"unknown node {target!r}")
            path = self.paths[target]
        else:
            path = tuple(target)
        current = self.scene.roots[path[0]]
        m = self._node_live_local(current)
        for step in path[1:]:
            current = current.children[step] if isinstance(step, int) else current.fields[step]
            m = m @ self._node_live_local(current)
        return m

    def _viewpoint_world_pose(self, name: str) -> ViewerPose:
        node = self.defs[name]
        if node.kind is not NodeKind.Viewpoint:
            raise SimulationError(f"{name!r} is not a Viewpoint")
        m = self.world_matrix(name)
        pos = apply_to_point(m, self.get_live(name, "position"))
        rot3 = m[:3, :3] @ rotation_matrix(self.get_live(name, "orientation"))[:3, :3]
        return ViewerPose(pos, rotation_from_matrix3(rot3))

    # ------------------------------------------------------------------
    # Tracing and cascade.

    def _trace_rec(self, source: str, value):
        if self.config.verbosity == "changes" and self._last_traced.get(source) == value:
            return
        self._last_traced[source] = value
        self._trace.append(TraceRecord(self._tau, source, value, self._seq))
        self._seq += 1

    def _emit(self, name: str, out_field: str, value, traced: bool = True):
        route_ids = self.routes_by_source.get((name, out_field), [])
        if traced or route_ids:
            self._trace_rec(f"{name}.{out_field}", value)
        for rid in route_ids:
            if rid not in self._fired:
                self._fired.add(rid)
                self._queue.append((rid, value))

    def _drain(self):
        while self._queue:
            rid, value = self._queue.popleft()
            self._apply_input(self.routes[rid], value)

    def _apply_input(self, route: _RouteInfo, value):
        name = route.to_node
        node = self.defs[name]
        fieldname = route.in_field
        if node.kind in _INTERPOLATE and fieldname == "set_fraction":
            out = _INTERPOLATE[node.kind](self.tracks[name], value)
            self._emit(name, "value_changed", out)
            return
        if node.kind is NodeKind.Viewpoint and fieldname == "set_bind":
            if value:
                self._bind(name)
            elif name in self.bind_stack:
                self._unbind(name)
            return
        if fieldname == "set_bind":
            return  # Background binding has no observable model here
        self.live[(name, fieldname)] = value
        if node.kind is NodeKind.TimeSensor:
            state = self.timers[name]
            if fieldname == "startTime":
                state.start_time = value
                self._terminal_sent.discard(name)  # retrigger restarts the cycle
            elif fieldname == "stopTime":
                state.stop_time = value
            elif fieldname == "cycleInterval":
                if value > 0:
                    state.cycle_interval = value
            elif fieldname == "enabled":
                state.enabled = value
            elif fieldname == "loop":
                state.loop = value
        # inputOutput fields echo an output event with the new value.
        self._emit(name, fieldname, value, traced=False)

    # ------------------------------------------------------------------
    # Viewer, binding, transitions.

    def effective_pose(self, at: float) -> ViewerPose:
        if self.transition is not None:
            tr = self.transition
            u = 1.0 if tr.duration <= 0 else (at - tr.t0) / tr.duration
            if u < 1.0:
                u = max(0.0, u)
                pos = Vec3(
                    tr.from_pose.position.x + u * (tr.to_pose.position.x - tr.from_pose.position.x),
                    tr.from_pose.position.y + u * (tr.to_pose.position.y - tr.from_pose.position.y),
                    tr.from_pose.position.z + u * (tr.to_pose.position.z - tr.from_pose.position.z),
                )
                q = quat_slerp(
                    quat_from_rotation(tr.from_pose.orientation),
                    quat_from_rotation(tr.to_pose.orientation),
                    u,
                )
                return ViewerPose(pos, rotation_from_quat(q))
            # transition has landed; fall through to the attached pose
        if self.viewer_mode == "manual" or not self.bind_stack:
            return self.manual_pose
        return self._viewpoint_world_pose(self.bind_stack[-1])

    def _bind(self, name: str):
        if name not in self.defs:
            raise SimulationError(f"unknown viewpoint {name!r}")
        if self.defs[name].kind is not NodeKind.Viewpoint:
            raise SimulationError(f"{name!r} is not a Viewpoint")
        if self.bind_stack and self.bind_stack[-1] == name:
            return  # already bound: no-op, no trace
        from_pose = self.effective_pose(self._tau if self._tau is not None else self.now)
        if self.bind_stack:
            self._emit(self.bind_stack[-1], "isBound", False)
        if name in self.bind_stack:
            self.bind_stack.remove(name)
        self.bind_stack.append(name)
        self._emit(name, "isBound", True)
        to_pose = self._viewpoint_world_pose(name)
        t0 = self._tau if self._tau is not None else self.now
        if self.config.transition_duration > 0:
            self.transition = _Transition(from_pose, to_pose, t0, self.config.transition_duration)
        else:
            self.transition = None
        self.viewer_mode = "attached"
        self.viewer = self.effective_pose(t0)

    def _unbind(self, name: str):
        was_top = self.bind_stack and self.bind_stack[-1] == name
        self.bind_stack.remove(name)
        self._emit(name, "isBound", False)
        if was_top and self.bind_stack:
            self._emit(self.bind_stack[-1], "isBound", True)
            from_pose = self.viewer
            to_pose = self._viewpoint_world_pose(self.bind_stack[-1])
            if self.config.transition_duration > 0:
                self.transition = _Transition(
                    from_pose, to_pose, self._tau, self.config.transition_duration
                )

    # ------------------------------------------------------------------
    # Timestamp machinery.

    def _open_timestamp(self, tau: float):
        if self._tau != tau:
            self._tau = tau
            self._fired = set()
            self._seq = 0

    def _inject(self, event: SimEvent):
        if event.kind == "touch":
            target = self.defs.get(event.node)
            if target is None:
                raise SimulationError(f"touch target {event.node!r} is not DEF'd")
            sensors = []
            if target.kind is NodeKind.TouchSensor:
                sensors.append(event.node)
            else:
                from ..scene.types import walk

                for item, _ in walk(target):
                    if (
                        isinstance(item, Node)
                        and item.kind is NodeKind.TouchSensor
                        and item.def_name
                    ):
                        sensors.append(item.def_name)
            for sname in sensors:
                if self.get_live(sname, "enabled"):
                    self._emit(sname, "touchTime", self._tau)
            self._drain()
        elif event.kind == "set_viewer_pose":
            self.viewer_mode = "manual"
            self.manual_pose = event.pose
            self.transition = None
            self.viewer = event.pose
        elif event.kind == "bind_viewpoint":
            self._bind(event.viewpoint)
            self._drain()
        elif event.kind == "reset":
            for name, state in self.timers.items():
                if not self._is_triggered_timer(name):
                    continue
                state.stop_time = self._tau
                self.live[(name, "stopTime")] = self._tau
                self._emit(name, "fraction_changed", 0.0)
            self._drain()
        elif event.kind == "advance_only":
            pass

    def _is_triggered_timer(self, name: str) -> bool:
        """Timers with an incoming startTime route are trigger-driven; Reset
        applies to them and leaves free-running loops (sun cycles) alone."""
        for info in self.routes:
            if info.to_node == name and info.in_field == "startTime":
                return True
        return False

    def _tick(self):
        tau = self._tau
        for name, state in self.timers.items():
            fraction, active = timesensor_fraction(state, tau)
            if active:
                if not state.is_active:
                    state.is_active = True
                    self._emit(name, "isActive", True)
                self._emit(name, "fraction_changed", fraction)
                if not state.loop and fraction == 1.0:
                    self._terminal_sent.add(name)  # a tick landed on the end
            elif state.is_active:
                state.is_active = False
                natural_end = (
                    not state.loop and tau >= state.start_time + state.cycle_interval
                )
                if natural_end and name not in self._terminal_sent:
                    self._emit(name, "fraction_changed", 1.0)
                    self._terminal_sent.add(name)
                self._emit(name, "isActive", False)
        self._drain()

    def _update_viewer(self):
        tau = self._tau
        if self.transition is not None and tau >= self.transition.t0 + self.transition.duration:
            self.transition = None  # landed: attach to the bound viewpoint
        self.viewer = self.effective_pose(tau)

    def _eval_proximity(self):
        for name in self.prox_prev:
            node = self.defs[name]
            events = evaluate_proximity(
                node, self.world_matrix(name), self.prox_prev[name], self.viewer, self._tau
            )
            self.prox_prev[name] = self.viewer
            for fieldname, value in events:
                self._emit(name, fieldname, value)
        self._drain()

    def _eval_lods(self):
        for name, path, node in self._lods:
            idx = select_lod_child(node, self.viewer.position, self.world_matrix(path))
            prev = self._lod_state[path]
            self._lod_state[path] = idx
            if prev is not None and idx != prev and name:
                self._emit(name, "level_changed", idx)
        self._drain()

    def lod_selection(self) -> dict:
        """Current child index per DEF'd LOD (None before first evaluation)."""
        return {name: self._lod_state[path] for name, path, _ in self._lods if name}

    def _process_timestamp(self, tau: float, events: list):
        self._open_timestamp(tau)
        for event in events:
            self._inject(event)
        if self._is_tick(tau):
            self._tick()
        self._update_viewer()
        self._eval_proximity()
        self._eval_lods()
        self._processed_through = tau

    def _is_tick(self, tau: float) -> bool:
        return tau == self._next_tick_time()

    def _next_tick_time(self) -> float:
        return self._next_tick_k / self.config.sample_rate

    # ------------------------------------------------------------------
    # Public stepping API.

    def bind_viewpoint(self, name: str, at: float) -> list:
        """Bind a viewpoint at a given time, scheduling the transition.

        Equivalent to stepping to `at` with a single bind event, so the
        sampling ticks in between still run.  Binding the already-bound
        viewpoint produces no trace records.
        """
        return self.step_to(at, [SimEvent(at=at, kind="bind_viewpoint", viewpoint=name)])

    def step_to(self, t: float, script=()) -> list:
        """Advance to time t, processing script events; returns new trace
        records in deterministic order."""
        if t < self.now:
            raise SimulationError(f"cannot step backwards to {t} from {self.now}")
        events = list(script)
        for a, b in zip(events, events[1:]):
            if b.at < a.at:
                raise SimulationError("script events out of order")
        for event in events:
            if event.at <= self._processed_through or event.at > t:
                raise SimulationError(
                    f"script event at {event.at} outside ({self._processed_through}, {t}]"
                )

        trace_start = len(self._trace)
        i = 0
        while True:
            next_event_t = events[i].at if i < len(events) else None
            next_tick_t = self._next_tick_time()
            candidates = []
            if next_event_t is not None and next_event_t <= t:
                candidates.append(next_event_t)
            if next_tick_t <= t:
                candidates.append(next_tick_t)
            if not candidates:
                break
            tau = min(candidates)
            batch = []
            while i < len(events) and events[i].at == tau:
                batch.append(events[i])
                i += 1
            self._process_timestamp(tau, batch)
            if tau == self._next_tick_time():
                self._next_tick_k += 1
        self.now = t
        return self._trace[trace_start:]

    def run(self, script, until: float) -> list:
        return self.step_to(until, script)
