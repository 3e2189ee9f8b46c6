"""Shared geometry and appearance builders for the generated scenes.

Meshes are grid-subdivided prisms and terrain patches: the artist models
the original project imported are stood in for by densifiable
IndexedFaceSets whose point budget is the sizing knob for the compression
corpus.  Grid rows reuse identical coordinate values, which is what gives
the binary payload stage something to bite on.
"""

from __future__ import annotations

import math

from ..scene.schema import build_node
from ..scene.types import Node, Vec3


def material(diffuse, emissive=None, def_name=None) -> Node:
    fields = {"diffuseColor": diffuse}
    if emissive is not None:
        fields["emissiveColor"] = emissive
    return build_node("Material", def_name=def_name, **fields)


def appearance(diffuse=(0.8, 0.8, 0.8), texture_url=None, def_name=None) -> Node:
    fields = {"material": material(diffuse)}
    if texture_url is not None:
        fields["texture"] = build_node("ImageTexture", url=(texture_url,))
    return build_node("Appearance", def_name=def_name, **fields)


def box_shape(size, diffuse=(0.8, 0.8, 0.8), texture_url=None, emissive=None) -> Node:
    app = build_node(
        "Appearance",
        material=material(diffuse, emissive),
        **({"texture": build_node("ImageTexture", url=(texture_url,))} if texture_url else {}),
    )
    return build_node("Shape", appearance=app, geometry=build_node("Box", size=size))


def mesh_shape(points, coord_index, diffuse=(0.8, 0.8, 0.8)) -> Node:
    return build_node(
        "Shape",
        appearance=appearance(diffuse),
        geometry=build_node(
            "IndexedFaceSet",
            coord=build_node("Coordinate", point=tuple(points)),
            coordIndex=tuple(coord_index),
            creaseAngle=0.9,
        ),
    )


def _quad_indices(nu: int, nv: int, base: int, flip: bool = False):
    """coordIndex quads for an nu x nv vertex grid (row-major)."""
    idx = []
    for v in range(nv - 1):
        for u in range(nu - 1):
            a = base + v * nu + u
            b = a + 1
            c = a + nu + 1
            d = a + nu
            quad = (a, d, c, b) if flip else (a, b, c, d)
            idx.extend(quad)
            idx.append(-1)
    return idx


def prism_mesh(length: float, height: float, width: float, density: int):
    """Elongated hull with grid-subdivided side faces.

    Spans x in [-length, 0], y in [0, height], z in [-w/2, w/2]; a gentle
    arched profile keeps the silhouette from being a plain box.  `density`
    is the approximate total point budget across the two side faces.
    """
    aspect = max(length / height, 1.0)
    nu = max(3, int(round(math.sqrt(density / 2.0 * aspect))))
    nv = max(3, int(round(density / (2.0 * nu))))
    xs = [-length + length * u / (nu - 1) for u in range(nu)]
    ys = [height * v / (nv - 1) for v in range(nv)]

    points: list = []
    index: list = []

    def arch(x):
        # belly line: slight lift toward the ends
        t = (x + length) / length
        return 0.08 * height * math.sin(math.pi * t)

    for zsign in (1.0, -1.0):
        base = len(points)
        z = zsign * width / 2.0
        for y in ys:
            for x in xs:
                points.append(Vec3(x, y + arch(x) * (y / height), z))
        index.extend(_quad_indices(nu, nv, base, flip=zsign < 0))

    # top and bottom strips join the side grids' outer rows
    top_base = len(points)
    for zsign in (1.0, -1.0):
        for x in xs:
            points.append(Vec3(x, height + arch(x), zsign * width / 2.0))
    index.extend(_quad_indices(nu, 2, top_base, flip=True))
    bot_base = len(points)
    for zsign in (1.0, -1.0):
        for x in xs:
            points.append(Vec3(x, 0.0, zsign * width / 2.0))
    index.extend(_quad_indices(nu, 2, bot_base))

    # end caps
    cap = len(points)
    for x in (-length, 0.0):
        for y in (0.0, height):
            for zsign in (1.0, -1.0):
                points.append(Vec3(x, y, zsign * width / 2.0))
    for k in (0, 4):
        a, b, c, d = cap + k, cap + k + 1, cap + k + 3, cap + k + 2
        index.extend((a, b, c, d, -1))
    return points, index


def terrain_mesh(width: float, depth: float, nx: int, nz: int, amplitude: float = 0.006):
    """Ground patch with deterministic low ripples, centered at the origin."""
    points = []
    for iz in range(nz):
        z = -depth / 2.0 + depth * iz / (nz - 1)
        for ix in range(nx):
            x = -width / 2.0 + width * ix / (nx - 1)
            y = amplitude * math.sin(3.1 * x + 1.7 * z) * math.cos(2.3 * z)
            points.append(Vec3(x, y, z))
    return points, _quad_indices(nx, nz, 0, flip=True)


def ribbon_mesh(path, width: float, segments_per_span: int):
    """Flat ribbon following a polyline, densified per span: the drawn
    train route on the map."""
    samples: list = []
    for a, b in zip(path, path[1:]):
        for s in range(segments_per_span):
            t = s / segments_per_span
            samples.append(
                Vec3(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y), a.z + t * (b.z - a.z))
            )
    samples.append(path[-1])
    points = []
    for i, p in enumerate(samples):
        if i + 1 < len(samples):
            d = samples[i + 1] - p
        else:
            d = p - samples[i - 1]
        n = math.hypot(d.x, d.z) or 1.0
        # horizontal normal to the travel direction
        nxz = (-d.z / n, d.x / n)
        points.append(Vec3(p.x + nxz[0] * width / 2, p.y, p.z + nxz[1] * width / 2))
        points.append(Vec3(p.x - nxz[0] * width / 2, p.y, p.z - nxz[1] * width / 2))
    index = []
    for i in range(len(samples) - 1):
        a = 2 * i
        index.extend((a, a + 1, a + 3, a + 2, -1))
    return points, index


def heading_about_y(dx: float, dz: float) -> float:
    """Yaw (about +Y) that turns local +X into the horizontal direction
    (dx, dz)."""
    return math.atan2(-dz, dx)


def facing_about_y(dx: float, dz: float) -> float:
    """Yaw (about +Y) that turns the default -Z gaze toward (dx, dz)."""
    return math.atan2(-dx, -dz)
