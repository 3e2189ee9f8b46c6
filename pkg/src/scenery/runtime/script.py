"""Simulation script and trace wire formats (JSON lines).

Script lines carry one event each, e.g.

    {"at": 1.0, "kind": "touch", "node": "TrainBody"}
    {"at": 2.5, "kind": "bind_viewpoint", "viewpoint": "SavannahOverhead"}
    {"at": 3.0, "kind": "set_viewer_pose", "position": [0, 1, 4],
     "orientation": [0, 1, 0, 1.5707963]}
    {"at": 9.0, "kind": "reset"}

Trace lines are TraceRecords (`at`, `source`, `value`, `cascade_seq`)
followed by one summary footer line.  Typed values render as single-key
objects ({"Vec3": [...]}, {"Rotation": [...]}, {"Color": [...]}) so a
3-list position cannot be confused with a color.
"""

from __future__ import annotations

import json

from ..scene.types import ColorRGB, Rotation, Vec3
from .model import SimEvent, TraceRecord, ViewerPose


class ScriptError(ValueError):
    pass


def event_from_dict(data: dict) -> SimEvent:
    try:
        kind = data["kind"]
        at = float(data.get("at", 0.0))
        pose = None
        if "position" in data or "orientation" in data:
            pos = data.get("position", (0.0, 0.0, 0.0))
            orient = data.get("orientation", (0.0, 0.0, 1.0, 0.0))
            pose = ViewerPose(Vec3(*pos), Rotation(Vec3(*orient[:3]), orient[3]))
        return SimEvent(
            at=at,
            kind=kind,
            node=data.get("node"),
            viewpoint=data.get("viewpoint"),
            pose=pose,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ScriptError(f"bad script event {data!r}: {exc}") from exc


def event_to_dict(event: SimEvent) -> dict:
    out: dict = {"at": event.at, "kind": event.kind}
    if event.node is not None:
        out["node"] = event.node
    if event.viewpoint is not None:
        out["viewpoint"] = event.viewpoint
    if event.pose is not None:
        out["position"] = list(event.pose.position.as_tuple())
        out["orientation"] = list(event.pose.orientation.as_tuple())
    return out


def parse_script(text: str) -> list:
    """Parse JSONL script text into a SimEvent list (blank lines skipped)."""
    events = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.strip()
        if not line:
            continue
        try:
            data = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ScriptError(f"line {lineno}: invalid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise ScriptError(f"line {lineno}: expected an object")
        events.append(event_from_dict(data))
    return events


def value_to_json(value):
    if isinstance(value, Vec3):
        return {"Vec3": list(value.as_tuple())}
    if isinstance(value, Rotation):
        return {"Rotation": list(value.as_tuple())}
    if isinstance(value, ColorRGB):
        return {"Color": list(value.as_tuple())}
    if isinstance(value, (bool, int, float, str)) or value is None:
        return value
    raise TypeError(f"untraceable value {value!r}")


def record_to_dict(rec: TraceRecord) -> dict:
    return {
        "at": rec.at,
        "source": rec.source,
        "value": value_to_json(rec.value),
        "cascade_seq": rec.cascade_seq,
    }


def _dumps(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), ensure_ascii=False)


def render_trace(records, summary: dict) -> str:
    """JSONL: one record per line plus a summary footer line."""
    lines = [_dumps(record_to_dict(r)) for r in records]
    lines.append(_dumps({"summary": summary}))
    return "\n".join(lines) + "\n"


def pose_to_json(pose: ViewerPose) -> dict:
    return {
        "position": list(pose.position.as_tuple()),
        "orientation": list(pose.orientation.as_tuple()),
    }


def run_summary(sim, records) -> dict:
    return {
        "records": len(records),
        "final_time": sim.now,
        "bound_viewpoint": sim.bind_stack[-1] if sim.bind_stack else None,
        "viewer": pose_to_json(sim.viewer),
    }
