"""In-memory scene-graph model for the supported X3D node subset."""

from .promote import PromotionError, promote_static_groups
from .schema import (
    Access,
    FieldSpec,
    FieldType,
    NODE_SCHEMAS,
    SchemaError,
    build_node,
    get_field,
    resolve_route_field,
)
from .stats import InlineResolver, SceneStats, dict_resolver, null_resolver, scene_stats
from .transform import UnknownPathError, world_transform
from .types import (
    ColorRGB,
    Node,
    NodeKind,
    Rotation,
    Route,
    SceneGraph,
    UseRef,
    Vec3,
    def_index,
    snap32,
    walk,
    walk_scene,
)
from .validate import ValidationIssue, ValidationReport, validate

__all__ = [
    "Access",
    "ColorRGB",
    "FieldSpec",
    "FieldType",
    "InlineResolver",
    "NODE_SCHEMAS",
    "Node",
    "NodeKind",
    "PromotionError",
    "Rotation",
    "Route",
    "SceneGraph",
    "SceneStats",
    "SchemaError",
    "UnknownPathError",
    "UseRef",
    "ValidationIssue",
    "ValidationReport",
    "Vec3",
    "build_node",
    "def_index",
    "dict_resolver",
    "get_field",
    "null_resolver",
    "promote_static_groups",
    "resolve_route_field",
    "scene_stats",
    "snap32",
    "validate",
    "walk",
    "walk_scene",
    "world_transform",
]
