"""Value types and containers for the scene-graph model.

A scene is a tree of typed nodes plus an ordered route list.  Scenes are
built once and treated as immutable afterwards; every operation in this
package is a pure function over them, so sharing across threads is safe.

Real-valued fields other than times and rotation axes/angles are held at
single precision: ``snap32`` is applied at every construction boundary
(XML parser, binary decoder, programmatic builders) so that both codecs
round-trip field values bit-exactly.  Rotations are kept at double
precision because their axes are renormalized on construction, which is
incompatible with a single-precision grid.
"""

from __future__ import annotations

import math
import struct
from dataclasses import dataclass, field
from enum import Enum


def snap32(x: float) -> float:
    """Round to the nearest single-precision value (normalizing -0.0)."""
    v = struct.unpack("<f", struct.pack("<f", float(x)))[0]
    return 0.0 if v == 0.0 else v


@dataclass(frozen=True)
class Vec3:
    """3-component vector in scene units (meters)."""

    x: float
    y: float
    z: float

    def __post_init__(self):
        for c in ("x", "y", "z"):
            v = float(getattr(self, c))
            if not math.isfinite(v):
                raise ValueError(f"non-finite Vec3 component {c}={getattr(self, c)!r}")
            object.__setattr__(self, c, v)

    def __add__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x + other.x, self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Vec3") -> "Vec3":
        return Vec3(self.x - other.x, self.y - other.y, self.z - other.z)

    def scaled(self, k: float) -> "Vec3":
        return Vec3(self.x * k, self.y * k, self.z * k)

    def dot(self, other: "Vec3") -> float:
        return self.x * other.x + self.y * other.y + self.z * other.z

    def norm(self) -> float:
        return math.sqrt(self.dot(self))

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.x, self.y, self.z)


@dataclass(frozen=True)
class Rotation:
    """Axis-angle rotation; the axis is normalized on construction.

    A zero-length axis is a hard error rather than a silent identity:
    silent fixes hide authoring bugs.
    """

    axis: Vec3
    angle: float

    def __post_init__(self):
        angle = float(self.angle)
        if not math.isfinite(angle):
            raise ValueError(f"non-finite rotation angle {self.angle!r}")
        object.__setattr__(self, "angle", angle)
        n = self.axis.norm()
        if n == 0.0:
            raise ValueError("rotation axis must be non-zero")
        if abs(n - 1.0) > 1e-9:
            a = self.axis
            object.__setattr__(self, "axis", Vec3(a.x / n, a.y / n, a.z / n))

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.axis.x, self.axis.y, self.axis.z, self.angle)


@dataclass(frozen=True)
class ColorRGB:
    """RGB color with components in [0, 1]."""

    r: float
    g: float
    b: float

    def __post_init__(self):
        for c in ("r", "g", "b"):
            v = float(getattr(self, c))
            if not (0.0 <= v <= 1.0):
                raise ValueError(f"color component {c}={getattr(self, c)!r} outside [0, 1]")
            object.__setattr__(self, c, v)

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.r, self.g, self.b)


class NodeKind(str, Enum):
    """The supported node subset.  Anything else is a parse error."""

    Transform = "Transform"
    Group = "Group"
    StaticGroup = "StaticGroup"
    LOD = "LOD"
    Inline = "Inline"
    Shape = "Shape"
    Appearance = "Appearance"
    Material = "Material"
    ImageTexture = "ImageTexture"
    Box = "Box"
    IndexedFaceSet = "IndexedFaceSet"
    Coordinate = "Coordinate"
    Viewpoint = "Viewpoint"
    NavigationInfo = "NavigationInfo"
    Background = "Background"
    SpotLight = "SpotLight"
    TimeSensor = "TimeSensor"
    TouchSensor = "TouchSensor"
    ProximitySensor = "ProximitySensor"
    PositionInterpolator = "PositionInterpolator"
    OrientationInterpolator = "OrientationInterpolator"
    ColorInterpolator = "ColorInterpolator"
    Sound = "Sound"
    AudioClip = "AudioClip"
    WorldInfo = "WorldInfo"


@dataclass(frozen=True)
class UseRef:
    """Reference to an earlier DEF'd node (X3D USE)."""

    name: str


@dataclass(frozen=True)
class Route:
    """Declared event connection between two DEF'd nodes."""

    from_node: str
    from_field: str
    to_node: str
    to_field: str


@dataclass
class Node:
    """One scene node: kind, optional DEF name, typed fields, children.

    Only grouping kinds carry children; node-valued fields (a Shape's
    geometry, an Appearance's material, ...) live in ``fields``.  Build
    through :func:`scenery.scene.schema.build_node`, which enforces the
    per-kind field schema, or through the codecs.
    """

    kind: NodeKind
    def_name: str | None = None
    fields: dict = field(default_factory=dict)
    children: tuple = ()

    def __post_init__(self):
        self.children = tuple(self.children)


@dataclass
class SceneGraph:
    """Root container: ordered roots, ordered routes, metadata strings."""

    roots: tuple = ()
    routes: tuple = ()
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.roots = tuple(self.roots)
        self.routes = tuple(self.routes)
        self.meta = dict(self.meta)


def walk(node_or_ref, path=()):
    """Yield (node, path) for every Node in a subtree, preorder.

    ``path`` components are child indices (ints) or SFNode field names
    (strings).  USE references are yielded as-is without expansion.
    """
    yield node_or_ref, path
    if isinstance(node_or_ref, Node):
        for fname, fval in node_or_ref.fields.items():
            if isinstance(fval, (Node, UseRef)):
                yield from walk(fval, path + (fname,))
        for i, child in enumerate(node_or_ref.children):
            yield from walk(child, path + (i,))


def walk_scene(scene: SceneGraph):
    """Yield (node_or_ref, path) over all roots; paths start with a root index."""
    for i, root in enumerate(scene.roots):
        yield from walk(root, (i,))


def def_index(scene: SceneGraph) -> dict:
    """Map DEF name -> Node for every named node, in document order.

    Duplicate names keep the first occurrence (the validator reports
    duplicates separately).
    """
    index: dict = {}
    for item, _ in walk_scene(scene):
        if isinstance(item, Node) and item.def_name and item.def_name not in index:
            index[item.def_name] = item
    return index


def format_path(path: tuple) -> str:
    """Render a walk path like ``/2/children/0/geometry`` for diagnostics."""
    parts = []
    for p in path:
        parts.append(str(p))
    return "/" + "/".join(parts) if parts else "/"
