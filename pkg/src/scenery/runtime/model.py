"""Runtime data types: viewer pose, injected events, trace records, config."""

from __future__ import annotations

import json
import math
import os
from dataclasses import dataclass, field

from ..scene.types import Rotation, Vec3

CONFIG_ENV_VAR = "SCENERY_CONFIG"

EVENT_KINDS = ("touch", "set_viewer_pose", "bind_viewpoint", "reset", "advance_only")


@dataclass(frozen=True)
class ViewerPose:
    position: Vec3
    orientation: Rotation


IDENTITY_POSE = ViewerPose(Vec3(0, 0, 0), Rotation(Vec3(0, 0, 1), 0.0))


@dataclass(frozen=True)
class SimEvent:
    """One injected input: a touch, a viewer move, a viewpoint bind, a
    reset, or a bare time advance."""

    at: float
    kind: str
    node: str | None = None       # touch target
    viewpoint: str | None = None  # bind target
    pose: ViewerPose | None = None

    def __post_init__(self):
        if not (math.isfinite(self.at) and self.at >= 0.0):
            raise ValueError(f"event time must be finite and non-negative, got {self.at}")
        if self.kind not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {self.kind!r}")
        if self.kind == "touch" and not self.node:
            raise ValueError("touch event needs a node")
        if self.kind == "bind_viewpoint" and not self.viewpoint:
            raise ValueError("bind_viewpoint event needs a viewpoint")
        if self.kind == "set_viewer_pose" and self.pose is None:
            raise ValueError("set_viewer_pose event needs a pose")


@dataclass(frozen=True)
class TraceRecord:
    at: float
    source: str  # "DefName.field"
    value: object
    cascade_seq: int


@dataclass(frozen=True)
class SimConfig:
    sample_rate: float = 30.0
    transition_duration: float = 2.0
    verbosity: str = "full"  # "full" | "changes"

    def __post_init__(self):
        if not self.sample_rate > 0:
            raise ValueError("sample_rate must be positive")
        if self.transition_duration < 0:
            raise ValueError("transition_duration cannot be negative")
        if self.verbosity not in ("full", "changes"):
            raise ValueError(f"unknown verbosity {self.verbosity!r}")


def config_from_dict(data: dict) -> SimConfig:
    known = {"sample_rate", "transition_duration", "verbosity"}
    unknown = set(data) - known
    if unknown:
        raise ValueError(f"unknown config keys: {sorted(unknown)}")
    return SimConfig(**data)


def load_config(path: str | None = None) -> SimConfig:
    """Read a JSON config file; falls back to $SCENERY_CONFIG, then defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    if not path:
        return SimConfig()
    with open(path, "r", encoding="utf-8") as fh:
        return config_from_dict(json.load(fh))
