"""Sampled surface-comparison metrics.

Hausdorff and mean-squared Chamfer distances between two complexes,
plus a symmetric Chamfer color error for textured or vertex-colored
surfaces.  All three sample area-weighted random points (plus every
live vertex) and query exact closest points through a BVH.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bvh import Bvh
from .core import SimplicialComplex2
from .meshio import RawMesh, TextureImage

DEFAULT_METRIC_SAMPLES = 100_000


@dataclass
class PointCloudSample:
    """Random surface samples plus all live vertices of one mesh.

    faces/barys witness where each point lives; vertex entries use an
    incident face when one exists, else face -1.
    """

    positions: np.ndarray
    faces: np.ndarray
    barys: np.ndarray
    n_random: int
    seed: int
    zero_area: bool = False


def _face_corner_arrays(mesh: SimplicialComplex2):
    fids = sorted(mesh.live_faces())
    tris = np.array([mesh.faces[f] for f in fids], dtype=np.int64)
    return np.array(fids, dtype=np.int64), tris


def sample_surface(mesh: SimplicialComplex2, n: int = DEFAULT_METRIC_SAMPLES,
                   seed: int = 0) -> PointCloudSample:
    """Draw n area-weighted samples and append every live vertex.

    Deterministic for a seed, and prefix-nested: the first k random
    samples for count n >= k equal the k-sample draw, so enlarging n
    only adds points.  Zero-area (or faceless) meshes fall back to
    vertices only, flagged.
    """
    if n < 1:
        raise ValueError("sample count must be >= 1")
    pos = mesh.positions
    fids, tris = _face_corner_arrays(mesh)
    verts = np.array(sorted(mesh.live_vertices()), dtype=np.int64)
    vpos = pos[verts]
    vfaces = np.full(len(verts), -1, dtype=np.int64)
    vbarys = np.zeros((len(verts), 3), dtype=np.float64)
    corner_of = {}
    for k, f in enumerate(fids):
        for ci, v in enumerate(tris[k]):
            corner_of.setdefault(v, (f, ci))
    for vi, v in enumerate(verts):
        hit = corner_of.get(v)
        if hit is not None:
            vfaces[vi] = hit[0]
            vbarys[vi, hit[1]] = 1.0

    total = 0.0
    if len(fids):
        pa = pos[tris[:, 0]]
        pb = pos[tris[:, 1]]
        pc = pos[tris[:, 2]]
        areas = 0.5 * np.linalg.norm(np.cross(pb - pa, pc - pa), axis=1)
        total = float(areas.sum())
    if total <= 0.0:
        return PointCloudSample(vpos.copy(), vfaces, vbarys, 0, seed, zero_area=True)

    rng = np.random.default_rng(seed)
    u = rng.random((n, 3))
    cum = np.cumsum(areas)
    pick = np.minimum(np.searchsorted(cum, u[:, 0] * total, side="right"),
                      len(fids) - 1)
    r1 = u[:, 1]
    r2 = u[:, 2]
    flip = r1 + r2 > 1.0
    r1 = np.where(flip, 1.0 - r1, r1)
    r2 = np.where(flip, 1.0 - r2, r2)
    a = pa[pick]
    # Edge-vector interpolation keeps coordinates shared by all three
    # corners exact (flat fixtures must measure their offset exactly).
    pts = a + r1[:, None] * (pb[pick] - a) + r2[:, None] * (pc[pick] - a)
    barys = np.column_stack([1.0 - r1 - r2, r1, r2])
    return PointCloudSample(
        positions=np.concatenate([pts, vpos]),
        faces=np.concatenate([fids[pick], vfaces]),
        barys=np.concatenate([barys, vbarys]),
        n_random=n,
        seed=seed,
    )


def _mesh_bvh(mesh: SimplicialComplex2) -> Bvh:
    fids, tris = _face_corner_arrays(mesh)
    if not len(fids):
        raise ValueError("mesh has no live faces")
    pos = mesh.positions
    tri_points = np.stack([pos[tris[:, 0]], pos[tris[:, 1]], pos[tris[:, 2]]], axis=1)
    return Bvh(tri_points, face_ids=fids)


def _closest_d2(points: np.ndarray, bvh: Bvh) -> np.ndarray:
    out = np.empty(len(points), dtype=np.float64)
    for k in range(len(points)):
        p = points[k]
        out[k] = bvh.closest_point((p[0], p[1], p[2]))[0]
    return out


def _union_diagonal(a: SimplicialComplex2, b: SimplicialComplex2) -> float:
    pts = []
    for mesh in (a, b):
        live = sorted(mesh.live_vertices())
        if live:
            pts.append(mesh.positions[live])
    if not pts:
        return 0.0
    allp = np.concatenate(pts)
    return float(np.linalg.norm(allp.max(axis=0) - allp.min(axis=0)))


def hausdorff(a: SimplicialComplex2, b: SimplicialComplex2,
              n: int = DEFAULT_METRIC_SAMPLES, seed: int = 0,
              normalize: bool = False) -> float:
    """Sampled symmetric Hausdorff distance (a lower bound of the true one).

    Max over both directions of the max exact point-to-surface
    distance from one mesh's sample cloud to the other mesh.  With
    normalize, the raw value is divided by the union bbox diagonal.
    """
    d2 = max(
        float(_closest_d2(sample_surface(a, n, seed).positions, _mesh_bvh(b)).max()),
        float(_closest_d2(sample_surface(b, n, seed).positions, _mesh_bvh(a)).max()),
    )
    d = d2 ** 0.5
    if normalize:
        diag = _union_diagonal(a, b)
        d = d / diag if diag > 0 else d
    return d


def chamfer_ms(a: SimplicialComplex2, b: SimplicialComplex2,
               n: int = DEFAULT_METRIC_SAMPLES, seed: int = 0,
               normalize: bool = False) -> float:
    """Mean-squared Chamfer distance, averaged over both directions."""
    ab = float(_closest_d2(sample_surface(a, n, seed).positions, _mesh_bvh(b)).mean())
    ba = float(_closest_d2(sample_surface(b, n, seed).positions, _mesh_bvh(a)).mean())
    value = 0.5 * (ab + ba)
    if normalize:
        diag = _union_diagonal(a, b)
        value = value / (diag * diag) if diag > 0 else value
    return value


@dataclass
class ColoredSurface:
    """A complex paired with the color data needed to shade any point.

    Colors come from the raw mesh's texture+UVs when present, else its
    vertex colors; a surface with neither cannot be color-compared.
    """

    mesh: SimplicialComplex2
    raw: RawMesh
    texture: TextureImage | None = None

    @classmethod
    def from_raw(cls, raw: RawMesh, weld_eps: float = 0.0) -> "ColoredSurface":
        from .build import build_complex
        return cls(mesh=build_complex(raw, weld_eps=weld_eps), raw=raw,
                   texture=raw.texture)

    @property
    def has_colors(self) -> bool:
        textured = self.texture is not None and self.raw.face_uvs is not None
        return textured or self.raw.vertex_colors is not None

    def color_at(self, face: int, bary) -> tuple:
        """RGB in [0,1] at a barycentric point of a live face."""
        raw = self.raw
        mesh = self.mesh
        if self.texture is not None and raw.face_uvs is not None:
            fuv = raw.face_uvs[mesh.face_source[face]]
            if fuv[0] < 0 or fuv[1] < 0 or fuv[2] < 0:
                return (0.5, 0.5, 0.5)
            u = v = 0.0
            for w, t in zip(bary, fuv):
                u += w * raw.uvs[t][0]
                v += w * raw.uvs[t][1]
            return self.texture.sample(u, v)
        if raw.vertex_colors is not None:
            rgb = [0.0, 0.0, 0.0]
            for w, vid in zip(bary, mesh.faces[face]):
                col = raw.vertex_colors[mesh.vertex_source[vid]]
                rgb[0] += w * col[0]
                rgb[1] += w * col[1]
                rgb[2] += w * col[2]
            return (rgb[0], rgb[1], rgb[2])
        raise ValueError("surface has no color data")


def _texture_chamfer_one_way(src: ColoredSurface, dst: ColoredSurface,
                             dst_bvh: Bvh, n: int, seed: int) -> float:
    cloud = sample_surface(src.mesh, n, seed)
    total = 0.0
    count = 0
    for k in range(len(cloud.positions)):
        f = int(cloud.faces[k])
        if f < 0:
            continue
        ca = src.color_at(f, cloud.barys[k])
        p = cloud.positions[k]
        _, _, fb, bary = dst_bvh.closest_point((p[0], p[1], p[2]))
        cb = dst.color_at(fb, bary)
        dr = ca[0] - cb[0]
        dg = ca[1] - cb[1]
        db = ca[2] - cb[2]
        total += (dr * dr + dg * dg + db * db) ** 0.5
        count += 1
    if count == 0:
        raise ValueError("no color-resolvable sample points")
    return total / count


def texture_chamfer(a: ColoredSurface, b: ColoredSurface,
                    n: int = DEFAULT_METRIC_SAMPLES, seed: int = 0) -> float:
    """Symmetric Chamfer color error.

    Pairs each sample with the spatially closest point on the other
    surface (geometry only), takes the L2 RGB difference in [0,1]
    units, and averages both directions.
    """
    if not a.has_colors or not b.has_colors:
        raise ValueError("both surfaces need texture or vertex colors")
    bvh_a = _mesh_bvh(a.mesh)
    bvh_b = _mesh_bvh(b.mesh)
    ab = _texture_chamfer_one_way(a, b, bvh_b, n, seed)
    ba = _texture_chamfer_one_way(b, a, bvh_a, n, seed)
    return 0.5 * (ab + ba)
