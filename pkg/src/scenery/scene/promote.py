"""StaticGroup promotion: rewrite provably-static Groups so runtimes can
freeze them.

A Group qualifies when its subtree contains no sensor, no interpolator and
no Viewpoint, none of its DEF names is referenced by any route, and none is
USE'd from outside the subtree.  A USE inside the subtree that aliases an
outside DEF blocks promotion unless the aliased subtree is itself free of
dynamic nodes and route references (the alias would otherwise animate).
"""

from __future__ import annotations

from dataclasses import replace

from .schema import INTERPOLATOR_KINDS, SENSOR_KINDS
from .types import Node, NodeKind, SceneGraph, UseRef, def_index, walk, walk_scene
from .validate import validate

_BLOCKING_KINDS = SENSOR_KINDS | INTERPOLATOR_KINDS | {NodeKind.Viewpoint}


class PromotionError(ValueError):
    """Raised when promotion is asked to run on an invalid scene."""


def promote_static_groups(scene: SceneGraph) -> SceneGraph:
    """Return a copy of the scene with every qualifying Group made static.

    Idempotent: promoted StaticGroups already satisfy the static rules, so
    a second application is the identity.  Statistics other than the
    Group/StaticGroup kind split are untouched.
    """
    report = validate(scene)
    if not report.ok:
        raise PromotionError(
            f"scene has {len(report.errors)} validation error(s); fix before promoting"
        )

    routed: set[str] = set()
    for route in scene.routes:
        routed.add(route.from_node)
        routed.add(route.to_node)

    defs = def_index(scene)

    # Count USE sites per name so "USE'd outside the subtree" is checkable
    # by comparing against uses inside the candidate subtree.
    total_uses: dict[str, int] = {}
    for item, _ in walk_scene(scene):
        if isinstance(item, UseRef):
            total_uses[item.name] = total_uses.get(item.name, 0) + 1

    def subtree_static(node: Node) -> bool:
        """No dynamic kinds and no route-referenced DEFs in the subtree."""
        for item, _ in walk(node):
            if isinstance(item, UseRef):
                target = defs.get(item.name)
                if target is not None and not subtree_static(target):
                    return False
                continue
            if item.kind in _BLOCKING_KINDS:
                return False
            if item.def_name and item.def_name in routed:
                return False
        return True

    def qualifies(node: Node) -> bool:
        if node.kind is not NodeKind.Group:
            return False
        inside_defs: set[str] = set()
        inside_uses: dict[str, int] = {}
        for item, _ in walk(node):
            if isinstance(item, UseRef):
                inside_uses[item.name] = inside_uses.get(item.name, 0) + 1
                target = defs.get(item.name)
                if target is not None and not subtree_static(target):
                    return False
                continue
            if item.kind in _BLOCKING_KINDS:
                return False
            if item.def_name:
                if item.def_name in routed:
                    return False
                inside_defs.add(item.def_name)
        for name in inside_defs:
            if total_uses.get(name, 0) > inside_uses.get(name, 0):
                return False  # USE'd from outside the subtree
        return True

    def rewrite(item):
        if isinstance(item, UseRef):
            return item
        kind = NodeKind.StaticGroup if qualifies(item) else item.kind
        fields = {
            name: rewrite(value) if isinstance(value, (Node, UseRef)) else value
            for name, value in item.fields.items()
        }
        children = tuple(rewrite(c) for c in item.children)
        return Node(kind=kind, def_name=item.def_name, fields=fields, children=children)

    return SceneGraph(
        roots=tuple(rewrite(r) for r in scene.roots),
        routes=scene.routes,
        meta=dict(scene.meta),
    )
