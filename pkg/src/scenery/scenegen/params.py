"""Generator parameters and the declared scene manifest.

The manifest is the generator's own bookkeeping of what it built: expected
statistics (assembled from per-part tallies plus explicit inline/USE
multiplication, not from re-walking the finished tree with the stats
module), the bindable-viewpoint inventory with its static/animated split,
route and interpolator counts, the emitted file list, and the train
coupling points that the hinge-continuity checks pivot on.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field, replace

from ..scene.stats import SceneStats
from ..scene.types import Node, UseRef, Vec3, walk


@dataclass(frozen=True)
class GenParams:
    car_count: int = 2
    building_count: int = 12
    mesh_density: int = 500  # Coordinate points per train-engine face mesh
    include_debug_backdrop: bool = False
    include_debug_camera_cube: bool = False
    savannah_offset: Vec3 = Vec3(0.0, -500.0, 0.0)

    def __post_init__(self):
        if self.car_count < 1:
            raise ValueError(f"car_count must be >= 1, got {self.car_count}")
        if self.building_count < 0:
            raise ValueError(f"building_count must be >= 0, got {self.building_count}")
        if self.mesh_density < 8:
            raise ValueError(f"mesh_density must be >= 8, got {self.mesh_density}")

    def validate_offset(self, max_lod_range: float):
        if self.savannah_offset.norm() <= max_lod_range:
            raise ValueError(
                f"savannah_offset magnitude {self.savannah_offset.norm():g} must exceed "
                f"the LOD range {max_lod_range:g}"
            )


@dataclass
class SceneManifest:
    stats: SceneStats
    viewpoints: tuple = ()  # (def_name, animated)
    route_count: int = 0
    interpolators: dict = field(default_factory=dict)
    files: tuple = ()
    couplings: tuple = ()  # (parent_section, child_section, center xyz)

    @property
    def animated_viewpoint_count(self) -> int:
        return sum(1 for _, animated in self.viewpoints if animated)

    @property
    def static_viewpoint_count(self) -> int:
        return sum(1 for _, animated in self.viewpoints if not animated)

    def as_dict(self) -> dict:
        return {
            "stats": {
                "shape_count": self.stats.shape_count,
                "image_texture_count": self.stats.image_texture_count,
                "audio_clip_count": self.stats.audio_clip_count,
                "inline_count": self.stats.inline_count,
                "node_count_by_kind": dict(self.stats.node_count_by_kind),
            },
            "viewpoints": [
                {"name": name, "animated": animated} for name, animated in self.viewpoints
            ],
            "route_count": self.route_count,
            "interpolators": dict(self.interpolators),
            "files": list(self.files),
            "couplings": [
                {"parent": p, "child": c, "center": list(center)}
                for p, c, center in self.couplings
            ],
        }


def count_nodes(items) -> Counter:
    """Kind tally of literal nodes in subtrees; USE references count nothing
    here (the generator adds aliased content explicitly where it USEs)."""
    counts: Counter = Counter()
    for item in items:
        for sub, _ in walk(item):
            if isinstance(sub, Node):
                counts[sub.kind.value] += 1
    return counts


def stats_from_counter(counts: Counter) -> SceneStats:
    return SceneStats(
        shape_count=counts.get("Shape", 0),
        image_texture_count=counts.get("ImageTexture", 0),
        audio_clip_count=counts.get("AudioClip", 0),
        inline_count=counts.get("Inline", 0),
        node_count_by_kind={k: v for k, v in sorted(counts.items()) if v},
    )
