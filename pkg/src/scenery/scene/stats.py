"""Scene statistics with Inline expansion and per-instantiation USE counting.

A USE'd Shape is drawn once per instantiation site, so it counts once per
site; the same applies to every kind tally.  Inline nodes are expanded
through a caller-supplied resolver; unresolvable URLs contribute nothing
beyond a logged warning, and inline cycles are cut after the first repeat.
"""

from __future__ import annotations

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Optional

from .schema import get_field
from .types import Node, NodeKind, SceneGraph, UseRef, def_index

log = logging.getLogger(__name__)

# Maps an Inline url to the SceneGraph it names, or None when missing.
InlineResolver = Callable[[str], Optional[SceneGraph]]


def null_resolver(url: str) -> Optional[SceneGraph]:
    return None


def dict_resolver(mapping: dict) -> InlineResolver:
    return lambda url: mapping.get(url)


@dataclass
class SceneStats:
    shape_count: int = 0
    image_texture_count: int = 0
    audio_clip_count: int = 0
    inline_count: int = 0
    node_count_by_kind: dict = field(default_factory=dict)


_STAT_FIELDS = {
    NodeKind.Shape: "shape_count",
    NodeKind.ImageTexture: "image_texture_count",
    NodeKind.AudioClip: "audio_clip_count",
    NodeKind.Inline: "inline_count",
}


def scene_stats(scene: SceneGraph, resolver: InlineResolver = null_resolver) -> SceneStats:
    stats = SceneStats()
    counts: Counter = Counter()
    _count_scene(scene, resolver, stats, counts, url_stack=())
    stats.node_count_by_kind = {k.value: n for k, n in sorted(counts.items(), key=lambda kv: kv[0].value)}
    return stats


def _count_scene(scene, resolver, stats, counts, url_stack):
    defs = def_index(scene)
    for root in scene.roots:
        _count(root, defs, resolver, stats, counts, url_stack, frozenset())


def _count(item, defs, resolver, stats, counts, url_stack, open_defs):
    if isinstance(item, UseRef):
        target = defs.get(item.name)
        if target is not None and item.name not in open_defs:
            _count(target, defs, resolver, stats, counts, url_stack, open_defs | {item.name})
        return
    node: Node = item
    counts[node.kind] += 1
    attr = _STAT_FIELDS.get(node.kind)
    if attr:
        setattr(stats, attr, getattr(stats, attr) + 1)
    if node.kind is NodeKind.Inline:
        for url in get_field(node, "url"):
            if url in url_stack:
                log.warning("inline cycle at %r; counting it once", url)
                continue
            sub = resolver(url)
            if sub is None:
                log.warning("inline %r not resolvable; counted as empty", url)
                continue
            _count_scene(sub, resolver, stats, counts, url_stack + (url,))
            break  # X3D url lists are fallbacks; first resolvable wins
        return
    if node.def_name:
        open_defs = open_defs | {node.def_name}
    for value in node.fields.values():
        if isinstance(value, (Node, UseRef)):
            _count(value, defs, resolver, stats, counts, url_stack, open_defs)
    for child in node.children:
        _count(child, defs, resolver, stats, counts, url_stack, open_defs)
