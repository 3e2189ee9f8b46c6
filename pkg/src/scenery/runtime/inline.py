"""Inline expansion for simulation: splice referenced scenes into the tree.

Each resolvable Inline is replaced by a Group holding the referenced
scene's roots (keeping the Inline's DEF name so the LOD/children position
is preserved), and the referenced scene's routes are appended after the
host's.  DEF names are file-scoped in the encoding, so a collision between
host and inlined names is an error; the generator keeps them disjoint.
Unresolvable URLs become empty groups with a logged warning.
"""

from __future__ import annotations

import logging

from ..scene.schema import get_field
from ..scene.stats import InlineResolver, null_resolver
from ..scene.types import Node, NodeKind, SceneGraph, UseRef, walk_scene

log = logging.getLogger(__name__)


class InlineCollisionError(ValueError):
    """A DEF name appears both in the host scene and an inlined scene."""


def _def_names(scene: SceneGraph) -> set:
    names = set()
    for item, _ in walk_scene(scene):
        if isinstance(item, Node) and item.def_name:
            names.add(item.def_name)
    return names


def expand_inlines(scene: SceneGraph, resolver: InlineResolver = null_resolver) -> SceneGraph:
    """Flatten all resolvable Inlines; returns a new SceneGraph."""
    return _expand(scene, resolver, url_stack=())


def _expand(scene, resolver, url_stack):
    taken_names = _def_names(scene)
    extra_routes: list = []

    def rewrite(item):
        if isinstance(item, UseRef):
            return item
        node: Node = item
        if node.kind is NodeKind.Inline:
            inlined = None
            for url in get_field(node, "url"):
                if url in url_stack:
                    log.warning("inline cycle at %r; leaving it empty", url)
                    continue
                sub = resolver(url)
                if sub is None:
                    log.warning("inline %r not resolvable; leaving it empty", url)
                    continue
                inlined = _expand(sub, resolver, url_stack + (url,))
                break
            if inlined is None:
                return Node(kind=NodeKind.Group, def_name=node.def_name)
            collisions = _def_names(inlined) & taken_names
            if collisions:
                raise InlineCollisionError(
                    f"inlined scene redefines {sorted(collisions)[:5]}"
                )
            taken_names.update(_def_names(inlined))
            extra_routes.extend(inlined.routes)
            return Node(
                kind=NodeKind.Group,
                def_name=node.def_name,
                children=tuple(inlined.roots),
            )
        fields = {
            name: rewrite(value) if isinstance(value, (Node, UseRef)) else value
            for name, value in node.fields.items()
        }
        children = tuple(rewrite(c) for c in node.children)
        return Node(kind=node.kind, def_name=node.def_name, fields=fields, children=children)

    roots = tuple(rewrite(r) for r in scene.roots)
    return SceneGraph(
        roots=roots,
        routes=tuple(scene.routes) + tuple(extra_routes),
        meta=dict(scene.meta),
    )
