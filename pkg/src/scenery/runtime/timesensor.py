"""TimeSensor semantics: activation window and cyclic fraction.

Activation rule: a sensor is active iff

    enabled  and  now >= startTime
             and  (loop  or  now <= startTime + cycleInterval)
             and  (stopTime <= startTime  or  now < stopTime)

While active the fraction is the fractional part of
(now - startTime) / cycleInterval, except that a non-looping run reports
exactly 1.0 at (and past) its terminating instant.  A stopTime at or
before startTime means "no stop scheduled".
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from ..scene.schema import get_field
from ..scene.types import Node, NodeKind


@dataclass
class TimeSensorState:
    cycle_interval: float = 1.0
    loop: bool = False
    start_time: float = 0.0
    stop_time: float = 0.0
    enabled: bool = True
    is_active: bool = False

    def __post_init__(self):
        if not self.cycle_interval > 0.0:
            raise ValueError(f"cycleInterval must be positive, got {self.cycle_interval}")

    @classmethod
    def from_node(cls, node: Node) -> "TimeSensorState":
        if node.kind is not NodeKind.TimeSensor:
            raise ValueError(f"{node.kind.value} is not a TimeSensor")
        return cls(
            cycle_interval=get_field(node, "cycleInterval"),
            loop=get_field(node, "loop"),
            start_time=get_field(node, "startTime"),
            stop_time=get_field(node, "stopTime"),
            enabled=get_field(node, "enabled"),
        )


def timesensor_fraction(state: TimeSensorState, now: float) -> tuple:
    """(fraction, is_active) at an instant; pure, ignores stored is_active."""
    end = state.start_time + state.cycle_interval
    active = (
        state.enabled
        and now >= state.start_time
        and (state.loop or now <= end)
        and (state.stop_time <= state.start_time or now < state.stop_time)
    )
    if now < state.start_time:
        fraction = 0.0
    elif not state.loop and now >= end:
        fraction = 1.0
    else:
        temp = (now - state.start_time) / state.cycle_interval
        fraction = temp - math.floor(temp)
    return fraction, active
