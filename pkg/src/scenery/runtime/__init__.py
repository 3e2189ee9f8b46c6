"""Deterministic, headless event-model runtime."""

from .inline import InlineCollisionError, expand_inlines
from .interpolators import (
    KeyframeTrack,
    interpolate_color,
    interpolate_orientation,
    interpolate_position,
    track_from_node,
)
from .lod import select_lod_child
from .model import (
    CONFIG_ENV_VAR,
    SimConfig,
    SimEvent,
    TraceRecord,
    ViewerPose,
    config_from_dict,
    load_config,
)
from .proximity import evaluate_proximity, local_pose
from .script import (
    ScriptError,
    event_from_dict,
    event_to_dict,
    parse_script,
    record_to_dict,
    render_trace,
    run_summary,
    value_to_json,
)
from .simulator import Simulation, SimulationError
from .timesensor import TimeSensorState, timesensor_fraction

__all__ = [
    "CONFIG_ENV_VAR",
    "InlineCollisionError",
    "KeyframeTrack",
    "ScriptError",
    "SimConfig",
    "SimEvent",
    "Simulation",
    "SimulationError",
    "TimeSensorState",
    "TraceRecord",
    "ViewerPose",
    "config_from_dict",
    "event_from_dict",
    "event_to_dict",
    "evaluate_proximity",
    "expand_inlines",
    "interpolate_color",
    "interpolate_orientation",
    "interpolate_position",
    "load_config",
    "local_pose",
    "parse_script",
    "record_to_dict",
    "render_trace",
    "run_summary",
    "select_lod_child",
    "timesensor_fraction",
    "track_from_node",
    "value_to_json",
]
