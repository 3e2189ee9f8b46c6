"""Per-kind field schema: names, types, defaults, access, and routing rules.

This table is the single source of truth shared by the XML codec (attribute
order, lexical forms), the binary codec (field ids are positions in each
kind's spec list, so the order here is append-only), the validator, and the
event runtime (routable field resolution).  A human-readable rendering lives
in docs/field-schema.md.

The schema is closed: unknown fields are errors, not ignored.  Round-trip
fidelity demands it.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .types import ColorRGB, Node, NodeKind, Rotation, UseRef, Vec3, snap32


class FieldType(Enum):
    BOOL = "Bool"
    INT32 = "Int32"
    FLOAT = "Float"
    TIME = "Time"
    STRING = "String"
    VEC3 = "Vec3"
    ROTATION = "Rotation"
    COLOR = "Color"
    MF_INT32 = "MFInt32"
    MF_FLOAT = "MFFloat"
    MF_STRING = "MFString"
    MF_VEC3 = "MFVec3"
    MF_ROTATION = "MFRotation"
    MF_COLOR = "MFColor"
    SFNODE = "SFNode"
    MFNODE = "MFNode"


class Access(Enum):
    INIT = "initializeOnly"
    IN_OUT = "inputOutput"
    IN = "inputOnly"
    OUT = "outputOnly"


@dataclass(frozen=True)
class FieldSpec:
    name: str
    ftype: FieldType
    default: object = None
    access: Access = Access.IN_OUT
    child_kinds: frozenset | None = None  # for SFNODE/MFNODE


class SchemaError(ValueError):
    """A field name or value that does not conform to the node schema."""


def _v3(x, y, z) -> Vec3:
    return Vec3(snap32(x), snap32(y), snap32(z))


def _col(r, g, b) -> ColorRGB:
    return ColorRGB(snap32(r), snap32(g), snap32(b))


def _rot(x, y, z, a) -> Rotation:
    return Rotation(Vec3(x, y, z), a)


_F = FieldType
_A = Access


def _spec(name, ftype, default=None, access=_A.IN_OUT, kinds=None):
    if ftype is _F.FLOAT and default is not None:
        default = snap32(default)
    child_kinds = frozenset(NodeKind(k) for k in kinds) if kinds else None
    return FieldSpec(name, ftype, default, access, child_kinds)


_GEOMETRY = ("Box", "IndexedFaceSet")

NODE_SCHEMAS: dict[NodeKind, tuple[FieldSpec, ...]] = {
    NodeKind.Transform: (
        _spec("center", _F.VEC3, _v3(0, 0, 0)),
        _spec("rotation", _F.ROTATION, _rot(0, 0, 1, 0)),
        _spec("scale", _F.VEC3, _v3(1, 1, 1)),
        _spec("scaleOrientation", _F.ROTATION, _rot(0, 0, 1, 0)),
        _spec("translation", _F.VEC3, _v3(0, 0, 0)),
        _spec("children", _F.MFNODE, ()),
    ),
    NodeKind.Group: (
        _spec("children", _F.MFNODE, ()),
    ),
    NodeKind.StaticGroup: (
        _spec("children", _F.MFNODE, ()),
    ),
    NodeKind.LOD: (
        _spec("center", _F.VEC3, _v3(0, 0, 0), _A.INIT),
        _spec("range", _F.MF_FLOAT, (), _A.INIT),
        _spec("children", _F.MFNODE, ()),
        _spec("level_changed", _F.INT32, access=_A.OUT),
    ),
    NodeKind.Inline: (
        _spec("url", _F.MF_STRING, ()),
    ),
    NodeKind.Shape: (
        _spec("appearance", _F.SFNODE, None, kinds=("Appearance",)),
        _spec("geometry", _F.SFNODE, None, kinds=_GEOMETRY),
    ),
    NodeKind.Appearance: (
        _spec("material", _F.SFNODE, None, kinds=("Material",)),
        _spec("texture", _F.SFNODE, None, kinds=("ImageTexture",)),
    ),
    NodeKind.Material: (
        _spec("ambientIntensity", _F.FLOAT, 0.2),
        _spec("diffuseColor", _F.COLOR, _col(0.8, 0.8, 0.8)),
        _spec("emissiveColor", _F.COLOR, _col(0, 0, 0)),
        _spec("shininess", _F.FLOAT, 0.2),
        _spec("specularColor", _F.COLOR, _col(0, 0, 0)),
        _spec("transparency", _F.FLOAT, 0.0),
    ),
    NodeKind.ImageTexture: (
        _spec("url", _F.MF_STRING, ()),
        _spec("repeatS", _F.BOOL, True, _A.INIT),
        _spec("repeatT", _F.BOOL, True, _A.INIT),
    ),
    NodeKind.Box: (
        _spec("size", _F.VEC3, _v3(2, 2, 2), _A.INIT),
    ),
    NodeKind.IndexedFaceSet: (
        _spec("ccw", _F.BOOL, True, _A.INIT),
        _spec("convex", _F.BOOL, True, _A.INIT),
        _spec("coordIndex", _F.MF_INT32, (), _A.INIT),
        _spec("creaseAngle", _F.FLOAT, 0.0, _A.INIT),
        _spec("solid", _F.BOOL, True, _A.INIT),
        _spec("coord", _F.SFNODE, None, kinds=("Coordinate",)),
    ),
    NodeKind.Coordinate: (
        _spec("point", _F.MF_VEC3, ()),
    ),
    NodeKind.Viewpoint: (
        _spec("centerOfRotation", _F.VEC3, _v3(0, 0, 0)),
        _spec("description", _F.STRING, "", _A.INIT),
        _spec("fieldOfView", _F.FLOAT, 0.785398),
        _spec("jump", _F.BOOL, True),
        _spec("orientation", _F.ROTATION, _rot(0, 0, 1, 0)),
        _spec("position", _F.VEC3, _v3(0, 0, 10)),
        _spec("set_bind", _F.BOOL, access=_A.IN),
        _spec("bindTime", _F.TIME, access=_A.OUT),
        _spec("isBound", _F.BOOL, access=_A.OUT),
    ),
    NodeKind.NavigationInfo: (
        _spec("avatarSize", _F.MF_FLOAT, (snap32(0.25), snap32(1.6), snap32(0.75))),
        _spec("headlight", _F.BOOL, True),
        _spec("speed", _F.FLOAT, 1.0),
        _spec("type", _F.MF_STRING, ("EXAMINE", "ANY")),
        _spec("visibilityLimit", _F.FLOAT, 0.0),
    ),
    NodeKind.Background: (
        _spec("groundAngle", _F.MF_FLOAT, ()),
        _spec("groundColor", _F.MF_COLOR, ()),
        _spec("skyAngle", _F.MF_FLOAT, ()),
        _spec("skyColor", _F.MF_COLOR, (_col(0, 0, 0),)),
        _spec("set_bind", _F.BOOL, access=_A.IN),
        _spec("isBound", _F.BOOL, access=_A.OUT),
    ),
    NodeKind.SpotLight: (
        _spec("ambientIntensity", _F.FLOAT, 0.0),
        _spec("attenuation", _F.VEC3, _v3(1, 0, 0)),
        _spec("beamWidth", _F.FLOAT, 1.570796),
        _spec("color", _F.COLOR, _col(1, 1, 1)),
        _spec("cutOffAngle", _F.FLOAT, 0.785398),
        _spec("direction", _F.VEC3, _v3(0, 0, -1)),
        _spec("intensity", _F.FLOAT, 1.0),
        _spec("location", _F.VEC3, _v3(0, 0, 0)),
        _spec("on", _F.BOOL, True),
        _spec("radius", _F.FLOAT, 100.0),
    ),
    NodeKind.TimeSensor: (
        _spec("cycleInterval", _F.TIME, 1.0),
        _spec("enabled", _F.BOOL, True),
        _spec("loop", _F.BOOL, False),
        _spec("startTime", _F.TIME, 0.0),
        _spec("stopTime", _F.TIME, 0.0),
        _spec("cycleTime", _F.TIME, access=_A.OUT),
        _spec("fraction_changed", _F.FLOAT, access=_A.OUT),
        _spec("isActive", _F.BOOL, access=_A.OUT),
        _spec("time", _F.TIME, access=_A.OUT),
    ),
    NodeKind.TouchSensor: (
        _spec("description", _F.STRING, ""),
        _spec("enabled", _F.BOOL, True),
        _spec("isActive", _F.BOOL, access=_A.OUT),
        _spec("isOver", _F.BOOL, access=_A.OUT),
        _spec("touchTime", _F.TIME, access=_A.OUT),
    ),
    NodeKind.ProximitySensor: (
        _spec("center", _F.VEC3, _v3(0, 0, 0)),
        _spec("enabled", _F.BOOL, True),
        _spec("size", _F.VEC3, _v3(0, 0, 0)),
        _spec("enterTime", _F.TIME, access=_A.OUT),
        _spec("exitTime", _F.TIME, access=_A.OUT),
        _spec("isActive", _F.BOOL, access=_A.OUT),
        _spec("position_changed", _F.VEC3, access=_A.OUT),
        _spec("orientation_changed", _F.ROTATION, access=_A.OUT),
    ),
    NodeKind.PositionInterpolator: (
        _spec("key", _F.MF_FLOAT, ()),
        _spec("keyValue", _F.MF_VEC3, ()),
        _spec("set_fraction", _F.FLOAT, access=_A.IN),
        _spec("value_changed", _F.VEC3, access=_A.OUT),
    ),
    NodeKind.OrientationInterpolator: (
        _spec("key", _F.MF_FLOAT, ()),
        _spec("keyValue", _F.MF_ROTATION, ()),
        _spec("set_fraction", _F.FLOAT, access=_A.IN),
        _spec("value_changed", _F.ROTATION, access=_A.OUT),
    ),
    NodeKind.ColorInterpolator: (
        _spec("key", _F.MF_FLOAT, ()),
        _spec("keyValue", _F.MF_COLOR, ()),
        _spec("set_fraction", _F.FLOAT, access=_A.IN),
        _spec("value_changed", _F.COLOR, access=_A.OUT),
    ),
    NodeKind.Sound: (
        _spec("intensity", _F.FLOAT, 1.0),
        _spec("location", _F.VEC3, _v3(0, 0, 0)),
        _spec("maxBack", _F.FLOAT, 10.0),
        _spec("maxFront", _F.FLOAT, 10.0),
        _spec("minBack", _F.FLOAT, 1.0),
        _spec("minFront", _F.FLOAT, 1.0),
        _spec("spatialize", _F.BOOL, True, _A.INIT),
        _spec("source", _F.SFNODE, None, kinds=("AudioClip",)),
    ),
    NodeKind.AudioClip: (
        _spec("description", _F.STRING, ""),
        _spec("loop", _F.BOOL, False),
        _spec("pitch", _F.FLOAT, 1.0),
        _spec("startTime", _F.TIME, 0.0),
        _spec("stopTime", _F.TIME, 0.0),
        _spec("url", _F.MF_STRING, ()),
        _spec("duration_changed", _F.TIME, access=_A.OUT),
        _spec("isActive", _F.BOOL, access=_A.OUT),
    ),
    NodeKind.WorldInfo: (
        _spec("info", _F.MF_STRING, (), _A.INIT),
        _spec("title", _F.STRING, "", _A.INIT),
    ),
}

# Kinds whose schema includes a 'children' MFNode field.
GROUPING_KINDS = frozenset(
    k for k, specs in NODE_SCHEMAS.items() if any(s.name == "children" for s in specs)
)

# Kinds that may appear as scene roots or inside a 'children' field.  The
# remainder only occur as SFNode field values (geometry, material, ...).
CHILD_LEGAL_KINDS = frozenset(NODE_SCHEMAS) - frozenset(
    {
        NodeKind.Appearance,
        NodeKind.Material,
        NodeKind.ImageTexture,
        NodeKind.Box,
        NodeKind.IndexedFaceSet,
        NodeKind.Coordinate,
        NodeKind.AudioClip,
    }
)

# Default containerField: which parent SFNode field a nested XML element
# fills.  Everything not listed maps to 'children'.
CONTAINER_FIELDS: dict[NodeKind, str] = {
    NodeKind.Box: "geometry",
    NodeKind.IndexedFaceSet: "geometry",
    NodeKind.Coordinate: "coord",
    NodeKind.Appearance: "appearance",
    NodeKind.Material: "material",
    NodeKind.ImageTexture: "texture",
    NodeKind.AudioClip: "source",
}

SENSOR_KINDS = frozenset(
    {NodeKind.TimeSensor, NodeKind.TouchSensor, NodeKind.ProximitySensor}
)
INTERPOLATOR_KINDS = frozenset(
    {
        NodeKind.PositionInterpolator,
        NodeKind.OrientationInterpolator,
        NodeKind.ColorInterpolator,
    }
)

_SPEC_BY_NAME: dict[NodeKind, dict[str, FieldSpec]] = {
    kind: {s.name: s for s in specs} for kind, specs in NODE_SCHEMAS.items()
}


def field_spec(kind: NodeKind, name: str) -> FieldSpec | None:
    return _SPEC_BY_NAME[kind].get(name)


def field_specs(kind: NodeKind) -> tuple[FieldSpec, ...]:
    return NODE_SCHEMAS[kind]


def attribute_specs(kind: NodeKind):
    """Specs encodable as XML attributes, in canonical (schema) order."""
    return [
        s
        for s in NODE_SCHEMAS[kind]
        if s.access in (Access.INIT, Access.IN_OUT)
        and s.ftype not in (FieldType.SFNODE, FieldType.MFNODE)
    ]


def sfnode_specs(kind: NodeKind):
    return [s for s in NODE_SCHEMAS[kind] if s.ftype is FieldType.SFNODE]


def container_field(kind: NodeKind) -> str:
    return CONTAINER_FIELDS.get(kind, "children")


def _coerce_scalar(ftype: FieldType, value):
    if ftype is FieldType.BOOL:
        if not isinstance(value, bool):
            raise SchemaError(f"expected bool, got {value!r}")
        return value
    if ftype is FieldType.INT32:
        if isinstance(value, bool) or not isinstance(value, int):
            raise SchemaError(f"expected int, got {value!r}")
        if not -(2**31) <= value < 2**31:
            raise SchemaError(f"int32 out of range: {value}")
        return value
    if ftype is FieldType.FLOAT:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"expected float, got {value!r}")
        return snap32(value)
    if ftype is FieldType.TIME:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise SchemaError(f"expected time (seconds), got {value!r}")
        return float(value)
    if ftype is FieldType.STRING:
        if not isinstance(value, str):
            raise SchemaError(f"expected string, got {value!r}")
        return value
    if ftype is FieldType.VEC3:
        if isinstance(value, Vec3):
            return Vec3(snap32(value.x), snap32(value.y), snap32(value.z))
        if isinstance(value, (tuple, list)) and len(value) == 3:
            return Vec3(snap32(value[0]), snap32(value[1]), snap32(value[2]))
        raise SchemaError(f"expected Vec3, got {value!r}")
    if ftype is FieldType.ROTATION:
        if isinstance(value, Rotation):
            return value
        if isinstance(value, (tuple, list)) and len(value) == 4:
            return Rotation(Vec3(value[0], value[1], value[2]), value[3])
        raise SchemaError(f"expected Rotation, got {value!r}")
    if ftype is FieldType.COLOR:
        if isinstance(value, ColorRGB):
            return ColorRGB(snap32(value.r), snap32(value.g), snap32(value.b))
        if isinstance(value, (tuple, list)) and len(value) == 3:
            return ColorRGB(snap32(value[0]), snap32(value[1]), snap32(value[2]))
        raise SchemaError(f"expected ColorRGB, got {value!r}")
    raise SchemaError(f"scalar coercion for {ftype} not supported")


_MF_ELEM = {
    FieldType.MF_INT32: FieldType.INT32,
    FieldType.MF_FLOAT: FieldType.FLOAT,
    FieldType.MF_STRING: FieldType.STRING,
    FieldType.MF_VEC3: FieldType.VEC3,
    FieldType.MF_ROTATION: FieldType.ROTATION,
    FieldType.MF_COLOR: FieldType.COLOR,
}


def coerce_value(spec: FieldSpec, value):
    """Validate and canonicalize a field value against its spec."""
    ftype = spec.ftype
    if ftype is FieldType.SFNODE:
        if isinstance(value, UseRef):
            return value
        if isinstance(value, Node):
            if spec.child_kinds and value.kind not in spec.child_kinds:
                raise SchemaError(
                    f"field '{spec.name}' does not accept {value.kind.value}"
                )
            return value
        raise SchemaError(f"field '{spec.name}' expects a node, got {value!r}")
    if ftype is FieldType.MFNODE:
        items = tuple(value)
        for item in items:
            if isinstance(item, UseRef):
                continue
            if not isinstance(item, Node):
                raise SchemaError(f"children must be nodes, got {item!r}")
            if item.kind not in CHILD_LEGAL_KINDS:
                raise SchemaError(f"{item.kind.value} is not allowed as a child node")
        return items
    if ftype in _MF_ELEM:
        if isinstance(value, (str, bytes)):
            raise SchemaError(f"expected a sequence for '{spec.name}', got {value!r}")
        elem = _MF_ELEM[ftype]
        return tuple(_coerce_scalar(elem, v) for v in value)
    return _coerce_scalar(ftype, value)


def build_node(kind, def_name: str | None = None, children=(), **fields) -> Node:
    """Construct a schema-conformant Node.

    Values equal to their defaults are dropped, which keeps the stored form
    canonical (both codecs omit default fields).  Single-precision families
    are snapped to f32 here, the one construction boundary all programmatic
    scene building goes through.
    """
    kind = NodeKind(kind)
    specs = _SPEC_BY_NAME[kind]
    for name in fields:
        if name not in specs:
            raise SchemaError(f"{kind.value} has no field '{name}'")
    stored: dict = {}
    # Iterate in schema order so stored field order is canonical.
    for spec in NODE_SCHEMAS[kind]:
        if spec.name not in fields or fields[spec.name] is None:
            continue
        if spec.access not in (Access.INIT, Access.IN_OUT):
            raise SchemaError(f"{kind.value}.{spec.name} is an event, not an init field")
        if spec.ftype is FieldType.MFNODE:
            raise SchemaError("pass children via the children argument")
        value = coerce_value(spec, fields[spec.name])
        if value != spec.default:
            stored[spec.name] = value
    children = tuple(children)
    if children:
        if kind not in GROUPING_KINDS:
            raise SchemaError(f"{kind.value} does not take children")
        children = coerce_value(specs["children"], children)
    return Node(kind=kind, def_name=def_name, fields=stored, children=children)


def get_field(node: Node, name: str):
    """Effective value of a field: stored value or schema default."""
    if name == "children":
        return node.children
    if name in node.fields:
        return node.fields[name]
    spec = _SPEC_BY_NAME[node.kind].get(name)
    if spec is None:
        raise SchemaError(f"{node.kind.value} has no field '{name}'")
    return spec.default


# Event-type compatibility: a route is legal when both ends resolve and
# their event types match exactly.

_EVENT_TYPE = {
    FieldType.BOOL: "Bool",
    FieldType.INT32: "Int32",
    FieldType.FLOAT: "Float",
    FieldType.TIME: "Time",
    FieldType.STRING: "String",
    FieldType.VEC3: "Vec3",
    FieldType.ROTATION: "Rotation",
    FieldType.COLOR: "Color",
    FieldType.MF_INT32: "MFInt32",
    FieldType.MF_FLOAT: "MFFloat",
    FieldType.MF_STRING: "MFString",
    FieldType.MF_VEC3: "MFVec3",
    FieldType.MF_ROTATION: "MFRotation",
    FieldType.MF_COLOR: "MFColor",
}


def resolve_route_field(kind: NodeKind, name: str, direction: str):
    """Resolve a route endpoint field name to (canonical_name, event_type).

    ``direction`` is 'out' for a route source and 'in' for a target.
    inputOutput fields accept the bare name plus the conventional set_ /
    _changed aliases.  Returns None when the name does not resolve.
    """
    specs = _SPEC_BY_NAME[kind]
    candidates = [name]
    if direction == "in" and name.startswith("set_"):
        candidates.append(name[len("set_"):])
    if direction == "out" and name.endswith("_changed"):
        candidates.append(name[: -len("_changed")])
    wanted = (Access.OUT, Access.IN_OUT) if direction == "out" else (Access.IN, Access.IN_OUT)
    for cand in candidates:
        spec = specs.get(cand)
        if spec is None:
            continue
        if spec.ftype in (FieldType.SFNODE, FieldType.MFNODE):
            return None
        if spec.access in wanted:
            return cand, _EVENT_TYPE[spec.ftype]
    return None
