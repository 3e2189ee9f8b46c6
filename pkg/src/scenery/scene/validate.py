"""Scene validation: schema conformance, DEF/USE discipline, route legality,
StaticGroup rules, and interpolator/LOD well-formedness.

Validation never raises for malformed scenes; it returns a report whose
error codes are stable across runs (diagnostics are emitted in document
order, routes last).
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .schema import (
    CHILD_LEGAL_KINDS,
    GROUPING_KINDS,
    INTERPOLATOR_KINDS,
    SENSOR_KINDS,
    Access,
    FieldType,
    coerce_value,
    field_spec,
    get_field,
    SchemaError,
    resolve_route_field,
)
from .types import Node, NodeKind, SceneGraph, UseRef, format_path, walk, walk_scene


@dataclass(frozen=True)
class ValidationIssue:
    code: str
    path: str
    message: str


@dataclass
class ValidationReport:
    errors: list = field(default_factory=list)
    warnings: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.errors


_DYNAMIC_KINDS = SENSOR_KINDS | INTERPOLATOR_KINDS


def _check_cycles(scene: SceneGraph) -> list:
    """Object or USE cycles break the DAG invariant and would hang every
    walk, so they are detected up front and cut."""
    issues: list[ValidationIssue] = []

    def visit(item, path, open_ids, open_defs):
        if isinstance(item, UseRef):
            if item.name in open_defs:
                issues.append(
                    ValidationIssue(
                        "USE_CYCLE", format_path(path), f"USE '{item.name}' inside its own DEF subtree"
                    )
                )
            return
        if id(item) in open_ids:
            issues.append(
                ValidationIssue("NODE_CYCLE", format_path(path), "node contains itself")
            )
            return
        open_ids = open_ids | {id(item)}
        if item.def_name:
            open_defs = open_defs | {item.def_name}
        for name, value in item.fields.items():
            if isinstance(value, (Node, UseRef)):
                visit(value, path + (name,), open_ids, open_defs)
        for i, child in enumerate(item.children):
            visit(child, path + (i,), open_ids, open_defs)

    for i, root in enumerate(scene.roots):
        visit(root, (i,), frozenset(), frozenset())
    return issues


def validate(scene: SceneGraph) -> ValidationReport:
    """Check every scene-core invariant; malformed scenes yield error entries."""
    report = ValidationReport()
    cycle_issues = _check_cycles(scene)
    if cycle_issues:
        report.errors.extend(cycle_issues)
        return report

    def err(code, path, message):
        report.errors.append(ValidationIssue(code, format_path(path), message))

    defs_seen: dict[str, tuple] = {}
    static_paths: list[tuple] = []

    for item, path in walk_scene(scene):
        if isinstance(item, UseRef):
            if item.name not in defs_seen:
                err("USE_FORWARD", path, f"USE '{item.name}' precedes or lacks its DEF")
            continue
        node = item
        if node.def_name is not None:
            if node.def_name in defs_seen:
                err("DUP_DEF", path, f"duplicate DEF '{node.def_name}'")
            else:
                defs_seen[node.def_name] = path

        # Placement: roots and children must be child-legal kinds.
        in_children = len(path) == 1 or isinstance(path[-1], int)
        if in_children and node.kind not in CHILD_LEGAL_KINDS:
            err("BAD_CHILD", path, f"{node.kind.value} cannot appear as a child node")
        if node.children and node.kind not in GROUPING_KINDS:
            err("SCHEMA_CHILDREN", path, f"{node.kind.value} does not take children")

        for name, value in node.fields.items():
            spec = field_spec(node.kind, name)
            if spec is None:
                err("FIELD_UNKNOWN", path, f"{node.kind.value} has no field '{name}'")
                continue
            if spec.access not in (Access.INIT, Access.IN_OUT):
                err("FIELD_EVENT", path, f"{node.kind.value}.{name} is event-only")
                continue
            try:
                coerce_value(spec, value)
            except SchemaError as exc:
                err("FIELD_TYPE", path, f"{node.kind.value}.{name}: {exc}")

        if node.kind is NodeKind.LOD:
            ranges = get_field(node, "range")
            if any(b < a for a, b in zip(ranges, ranges[1:])):
                err("LOD_RANGE", path, "LOD ranges must be sorted ascending")
            if ranges and len(node.children) != len(ranges) + 1:
                err(
                    "LOD_CHILDREN",
                    path,
                    f"LOD with {len(ranges)} ranges needs {len(ranges) + 1} children, "
                    f"has {len(node.children)}",
                )
        if node.kind in INTERPOLATOR_KINDS:
            keys = get_field(node, "key")
            values = get_field(node, "keyValue")
            if len(keys) != len(values) or len(keys) < 1:
                err(
                    "INTERP_KEY_COUNT",
                    path,
                    f"key/keyValue lengths {len(keys)}/{len(values)} (need equal, >= 1)",
                )
            if any(b < a for a, b in zip(keys, keys[1:])):
                err("INTERP_KEY_ORDER", path, "keys must be non-decreasing")
            if any(not 0.0 <= k <= 1.0 for k in keys):
                err("INTERP_KEY_RANGE", path, "keys must lie in [0, 1]")
        if node.kind is NodeKind.StaticGroup:
            static_paths.append(path)

    # USE target kind legality for SFNode fields (after all DEFs known).
    def_nodes = {}
    for item, path in walk_scene(scene):
        if isinstance(item, Node) and item.def_name and item.def_name not in def_nodes:
            def_nodes[item.def_name] = item
    for item, path in walk_scene(scene):
        if not isinstance(item, Node):
            continue
        for name, value in item.fields.items():
            if isinstance(value, UseRef) and value.name in def_nodes:
                spec = field_spec(item.kind, name)
                if spec is not None and spec.child_kinds is not None:
                    target = def_nodes[value.name]
                    if target.kind not in spec.child_kinds:
                        err(
                            "USE_KIND",
                            path + (name,),
                            f"USE '{value.name}' is a {target.kind.value}, "
                            f"not allowed in {item.kind.value}.{name}",
                        )

    # Nothing dynamic below a StaticGroup.
    static_defs: set[str] = set()
    for spath in static_paths:
        node = _node_at(scene, spath)
        for item, sub in walk(node, spath):
            if not isinstance(item, Node):
                continue
            if item is not node and item.kind in _DYNAMIC_KINDS:
                err(
                    "STATIC_DYNAMIC_NODE",
                    sub,
                    f"{item.kind.value} under a StaticGroup",
                )
            if item.def_name:
                static_defs.add(item.def_name)

    # Routes: endpoints resolve, directions and event types line up, and no
    # endpoint sits beneath a StaticGroup.
    for i, route in enumerate(scene.routes):
        rpath = ("routes", i)
        src = def_nodes.get(route.from_node)
        dst = def_nodes.get(route.to_node)
        if src is None:
            err("ROUTE_ENDPOINT", rpath, f"fromNode '{route.from_node}' is not DEF'd")
        if dst is None:
            err("ROUTE_ENDPOINT", rpath, f"toNode '{route.to_node}' is not DEF'd")
        if src is None or dst is None:
            continue
        out = resolve_route_field(src.kind, route.from_field, "out")
        if out is None:
            err(
                "ROUTE_FIELD",
                rpath,
                f"{src.kind.value} has no output '{route.from_field}'",
            )
        into = resolve_route_field(dst.kind, route.to_field, "in")
        if into is None:
            err(
                "ROUTE_FIELD",
                rpath,
                f"{dst.kind.value} has no input '{route.to_field}'",
            )
        if out is not None and into is not None and out[1] != into[1]:
            err(
                "ROUTE_TYPE",
                rpath,
                f"event types differ: {out[1]} -> {into[1]}",
            )
        for end, label in ((route.from_node, "source"), (route.to_node, "target")):
            if end in static_defs:
                err(
                    "STATIC_ROUTE_TARGET",
                    rpath,
                    f"route {label} '{end}' lies beneath a StaticGroup",
                )

    return report


def _node_at(scene: SceneGraph, path: tuple):
    current = scene.roots[path[0]]
    for step in path[1:]:
        if isinstance(step, int):
            current = current.children[step]
        else:
            current = current.fields[step]
    return current
