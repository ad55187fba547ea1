"""Texture transfer through the collapse history.

Colors for the simplified mesh are found by sampling a barycentric
grid on each of its faces, walking those fixed sample points backward
through the collapse sequence with per-split closest-point
re-projection, looking up the input's color at the final host, and
baking the results into a fresh per-face chart atlas.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field

import numpy as np

from .core import SimplicialComplex2
from .decimate import vertex_split
from .geom import closest_point_on_segment, closest_point_on_triangle
from .meshio import RawMesh, TextureImage

HOST_FACE = 0
HOST_EDGE = 1
HOST_VERTEX = 2

DEFAULT_SAMPLES_PER_EDGE = 4
DEFAULT_GUTTER = 2
DEFAULT_ATLAS_MAX = 8192

FALLBACK_RGB = (0.5, 0.5, 0.5)


def barycentric_grid(r: int):
    """Integer triples (a, b, c) with a+b+c == r, in canonical order.

    The order (c ascending, then b ascending) is the contract for
    sample enumeration, atlas texel layout, and the side-car format.
    """
    out = []
    for c in range(r + 1):
        for b in range(r + 1 - c):
            out.append((r - b - c, b, c))
    return out


def grid_sample_count(r: int) -> int:
    return (r + 1) * (r + 2) // 2


@dataclass(slots=True)
class SurfaceSample:
    """One fixed surface point sampled on the simplified mesh.

    The position never changes after sampling; only the host simplex
    is updated as the sample is projected backward through splits.
    """

    owner_face: int
    owner_bary: tuple
    position: tuple
    host_kind: int = HOST_FACE
    host_id: int = -1
    host_bary: tuple = (1.0, 0.0, 0.0)
    rgb: tuple | None = None
    used_fallback: bool = False


def sample_mesh_colors(mesh: SimplicialComplex2, r: int = DEFAULT_SAMPLES_PER_EDGE):
    """Sample the barycentric grid of every live face.

    Returns (r+1)(r+2)/2 samples per face in barycentric_grid order,
    each hosted on its owner face.
    """
    if r < 1:
        raise ValueError("samples per edge must be >= 1")
    grid = [(a / r, b / r, c / r) for a, b, c in barycentric_grid(r)]
    pos = mesh.positions
    samples = []
    for f in mesh.live_faces():
        a, b, c = mesh.faces[f]
        pa, pb, pc = pos[a], pos[b], pos[c]
        for wa, wb, wc in grid:
            p = (
                wa * pa[0] + wb * pb[0] + wc * pc[0],
                wa * pa[1] + wb * pb[1] + wc * pc[1],
                wa * pa[2] + wb * pb[2] + wc * pc[2],
            )
            samples.append(SurfaceSample(
                owner_face=f,
                owner_bary=(wa, wb, wc),
                position=p,
                host_kind=HOST_FACE,
                host_id=f,
                host_bary=(wa, wb, wc),
            ))
    return samples


def _project_to_candidates(sample: SurfaceSample, mesh: SimplicialComplex2,
                           faces, edges, vertices) -> None:
    """Re-host the sample on the closest candidate simplex.

    Faces win when any exist; dangling edges and isolated vertices are
    targets only in face-free regions.  Ties break toward the earliest
    candidate so projection is deterministic.
    """
    p = sample.position
    pos = mesh.positions
    best_d2 = None
    if faces:
        for f in faces:
            a, b, c = mesh.faces[f]
            q, bary = closest_point_on_triangle(p, pos[a], pos[b], pos[c])
            dx, dy, dz = p[0] - q[0], p[1] - q[1], p[2] - q[2]
            d2 = dx * dx + dy * dy + dz * dz
            if best_d2 is None or d2 < best_d2:
                best_d2 = d2
                sample.host_kind = HOST_FACE
                sample.host_id = f
                sample.host_bary = bary
        return
    if edges:
        for e in edges:
            a, b = mesh.edges[e]
            q, t = closest_point_on_segment(p, pos[a], pos[b])
            dx, dy, dz = p[0] - q[0], p[1] - q[1], p[2] - q[2]
            d2 = dx * dx + dy * dy + dz * dz
            if best_d2 is None or d2 < best_d2:
                best_d2 = d2
                sample.host_kind = HOST_EDGE
                sample.host_id = e
                sample.host_bary = (1.0 - t, t, 0.0)
        return
    for v in vertices:
        pv = pos[v]
        dx, dy, dz = p[0] - pv[0], p[1] - pv[1], p[2] - pv[2]
        d2 = dx * dx + dy * dy + dz * dz
        if best_d2 is None or d2 < best_d2:
            best_d2 = d2
            sample.host_kind = HOST_VERTEX
            sample.host_id = v
            sample.host_bary = (1.0, 0.0, 0.0)


def successive_project(samples, history, mesh: SimplicialComplex2) -> int:
    """Walk samples backward from M^c to M^0 through vertex splits.

    The mesh is mutated in place: every history record is undone in
    reverse order.  At each split, samples hosted in the one-ring of
    the split vertex re-project their fixed position onto the closest
    simplex of the restored edge's one-ring.  Returns the number of
    samples that ever needed the global fallback (no local candidate).
    """
    by_face: dict = {}
    by_edge: dict = {}
    by_vertex: dict = {}
    buckets = (by_face, by_edge, by_vertex)
    for idx, s in enumerate(samples):
        buckets[s.host_kind].setdefault(s.host_id, set()).add(idx)

    lost: set = set()
    svf = mesh.star_vertex_faces
    sve = mesh.star_vertex_edges
    for rec in reversed(history):
        i = rec.vertex_kept
        j = rec.vertex_removed
        affected = set()
        for f in svf[i]:
            affected.update(by_face.get(f, ()))
        for e in sve[i]:
            affected.update(by_edge.get(e, ()))
        affected.update(by_vertex.get(i, ()))
        vertex_split(mesh, rec)
        if not affected:
            continue
        faces = sorted(svf[i] | svf[j])
        edges = ()
        vertices = ()
        if not faces:
            edges = sorted(sve[i] | sve[j])
            if not edges:
                vertices = tuple(v for v in (i, j) if mesh.vertex_alive[v])
                if not vertices:
                    lost.update(affected)
                    continue
        for idx in sorted(affected):
            s = samples[idx]
            buckets[s.host_kind][s.host_id].discard(idx)
            _project_to_candidates(s, mesh, faces, edges, vertices)
            buckets[s.host_kind].setdefault(s.host_id, set()).add(idx)
    if lost:
        # Vanished regions: project globally onto whatever M^0 offers.
        faces = sorted(mesh.live_faces())
        edges = () if faces else sorted(mesh.live_edges())
        vertices = () if (faces or edges) else sorted(mesh.live_vertices())
        for idx in sorted(lost):
            _project_to_candidates(samples[idx], mesh, faces, edges, vertices)
    return len(lost)


def _host_face_and_bary(sample: SurfaceSample, mesh: SimplicialComplex2):
    """Borrow a face for a sample hosted on an edge or vertex, if any."""
    if sample.host_kind == HOST_FACE:
        return sample.host_id, sample.host_bary
    if sample.host_kind == HOST_EDGE:
        hosted = mesh.star_edge_faces[sample.host_id]
    else:
        hosted = mesh.star_vertex_faces[sample.host_id]
    if not hosted:
        return None, None
    f = min(hosted)
    a, b, c = mesh.faces[f]
    pos = mesh.positions
    _, bary = closest_point_on_triangle(sample.position, pos[a], pos[b], pos[c])
    return f, bary


def resolve_colors(samples, mesh: SimplicialComplex2, raw: RawMesh,
                   texture: TextureImage | None = None) -> int:
    """Pull input colors for samples whose hosts lie on M^0.

    Textured inputs interpolate the host face's corner UVs and sample
    the texture bilinearly; inputs with vertex colors interpolate those;
    bare inputs resolve to white.  Samples that cannot reach the color
    data (no host face where one is needed, or a face without UVs on a
    textured mesh) get a flat fallback color.  Returns the fallback
    count.
    """
    textured = texture is not None and raw.face_uvs is not None
    vcolors = raw.vertex_colors
    n_fallback = 0
    for s in samples:
        f, bary = _host_face_and_bary(s, mesh)
        if textured:
            rf = mesh.face_source[f] if f is not None else -1
            fuv = raw.face_uvs[rf] if rf >= 0 else None
            if fuv is None or fuv[0] < 0 or fuv[1] < 0 or fuv[2] < 0:
                s.rgb = FALLBACK_RGB
                s.used_fallback = True
                n_fallback += 1
                continue
            uv0 = raw.uvs[fuv[0]]
            uv1 = raw.uvs[fuv[1]]
            uv2 = raw.uvs[fuv[2]]
            wa, wb, wc = bary
            u = wa * uv0[0] + wb * uv1[0] + wc * uv2[0]
            v = wa * uv0[1] + wb * uv1[1] + wc * uv2[1]
            s.rgb = texture.sample(u, v)
        elif vcolors is not None:
            if f is not None:
                ids = mesh.faces[f]
                weights = bary
            elif s.host_kind == HOST_EDGE:
                a, b = mesh.edges[s.host_id]
                ids = (a, b, a)
                weights = (s.host_bary[0], s.host_bary[1], 0.0)
            else:
                ids = (s.host_id, s.host_id, s.host_id)
                weights = (1.0, 0.0, 0.0)
            rgb = [0.0, 0.0, 0.0]
            for vid, w in zip(ids, weights):
                col = vcolors[mesh.vertex_source[vid]]
                rgb[0] += w * col[0]
                rgb[1] += w * col[1]
                rgb[2] += w * col[2]
            s.rgb = (rgb[0], rgb[1], rgb[2])
        else:
            s.rgb = (1.0, 1.0, 1.0)
    return n_fallback


@dataclass
class AtlasLayout:
    """Where each face's chart lives in the baked atlas.

    Origins are bottom-left texel coordinates of the full cell (chart
    plus gutter band); cells are pairwise disjoint by construction.
    """

    face_ids: list = field(default_factory=list)
    origins: list = field(default_factory=list)
    r: int = DEFAULT_SAMPLES_PER_EDGE
    gutter: int = DEFAULT_GUTTER
    cell: int = 0
    width: int = 0
    height: int = 0

    def chart_bounds(self, k: int):
        x0, y0 = self.origins[k]
        return x0, y0, x0 + self.cell, y0 + self.cell


def _cell_fill_map(r: int, gutter: int):
    """Per-cell texel -> nearest written sample index, computed once.

    Written texels are the barycentric grid points at (gutter+b,
    gutter+c); every other texel in the cell copies the nearest one
    (squared Euclidean distance, first-in-grid-order tiebreak).
    """
    cell = r + 1 + 2 * gutter
    grid = barycentric_grid(r)
    wx = np.array([gutter + b for _, b, _ in grid])
    wy = np.array([gutter + c for _, _, c in grid])
    xs, ys = np.meshgrid(np.arange(cell), np.arange(cell), indexing="xy")
    d2 = (xs[..., None] - wx) ** 2 + (ys[..., None] - wy) ** 2
    return d2.argmin(axis=2), cell


def bake_atlas(mesh: SimplicialComplex2, samples, r: int = DEFAULT_SAMPLES_PER_EDGE,
               gutter: int = DEFAULT_GUTTER, atlas_max: int = DEFAULT_ATLAS_MAX):
    """Bake resolved sample colors into a per-face chart atlas.

    Each live face gets a right-triangle chart of r+1 texels per edge
    inside its own gutter-padded cell; charts are packed in shelf rows
    on a power-of-two canvas that doubles until everything fits.
    Returns (layout, image, uvs) where uvs[k] holds the k-th live
    face's corner UVs at its chart corner texel centers.
    """
    face_ids = sorted(mesh.live_faces())
    n = len(face_ids)
    if n == 0:
        raise ValueError("no live faces to bake")
    nearest, cell = _cell_fill_map(r, gutter)

    width = height = 16
    while width < cell:
        width *= 2
        height *= 2
    while (width // cell) * (height // cell) < n:
        if width <= height:
            width *= 2
        else:
            height *= 2
        if width > atlas_max or height > atlas_max:
            raise ValueError("atlas size limit exceeded")

    per_face = grid_sample_count(r)
    colors = np.empty((len(samples), 3), dtype=np.uint8)
    owner_of = np.empty(len(samples), dtype=np.int64)
    for idx, s in enumerate(samples):
        rgb = s.rgb if s.rgb is not None else FALLBACK_RGB
        colors[idx] = (
            int(rgb[0] * 255.0 + 0.5),
            int(rgb[1] * 255.0 + 0.5),
            int(rgb[2] * 255.0 + 0.5),
        )
        owner_of[idx] = s.owner_face
    start_of = {}
    for idx, s in enumerate(samples):
        if s.owner_face not in start_of:
            start_of[s.owner_face] = idx

    pixels = np.zeros((height, width, 4), dtype=np.uint8)
    cols = width // cell
    layout = AtlasLayout(face_ids=face_ids, origins=[], r=r, gutter=gutter,
                         cell=cell, width=width, height=height)
    uvs = np.zeros((n, 3, 2), dtype=np.float64)
    for k, f in enumerate(face_ids):
        x0 = (k % cols) * cell
        y0 = (k // cols) * cell
        layout.origins.append((x0, y0))
        s0 = start_of.get(f)
        if s0 is None or not np.all(owner_of[s0:s0 + per_face] == f):
            raise ValueError(f"samples missing or out of order for face {f}")
        block = colors[s0:s0 + per_face][nearest]
        rows = slice(height - y0 - cell, height - y0)
        pixels[rows, x0:x0 + cell, :3] = block[::-1, :, :]
        pixels[rows, x0:x0 + cell, 3] = 255
        for corner, (cx, cy) in enumerate(((gutter, gutter),
                                           (gutter + r, gutter),
                                           (gutter, gutter + r))):
            uvs[k, corner, 0] = (x0 + cx + 0.5) / width
            uvs[k, corner, 1] = (y0 + cy + 0.5) / height
    return layout, TextureImage(pixels=pixels), uvs


def transfer_texture(mesh: SimplicialComplex2, history, raw: RawMesh,
                     r: int = DEFAULT_SAMPLES_PER_EDGE, gutter: int = DEFAULT_GUTTER,
                     atlas_max: int = DEFAULT_ATLAS_MAX):
    """Full transfer pipeline for a decimated mesh.

    Samples the simplified mesh, projects the samples back to the
    input through the recorded history (on a scratch copy, so the
    simplified mesh is untouched), resolves input colors, and bakes
    the atlas.  Returns (layout, image, uvs, samples, stats).
    """
    samples = sample_mesh_colors(mesh, r)
    scratch = mesh.copy()
    n_lost = successive_project(samples, history, scratch)
    n_fallback = resolve_colors(samples, scratch, raw, raw.texture)
    layout, image, uvs = bake_atlas(mesh, samples, r, gutter, atlas_max)
    stats = {
        "n_samples": len(samples),
        "n_projection_fallbacks": n_lost,
        "n_color_fallbacks": n_fallback,
    }
    return layout, image, uvs, samples, stats


def save_mesh_colors(path, samples, r: int, face_id_map=None) -> None:
    """Dump raw per-face sample colors.

    Little-endian records: uint32 face id, uint32 r, then
    (r+1)(r+2)/2 RGB8 triples in barycentric_grid order.  face_id_map
    optionally renumbers owner ids (e.g. to compacted face indices).
    """
    per_face = grid_sample_count(r)
    if len(samples) % per_face != 0:
        raise ValueError("sample count does not match r")
    with open(path, "wb") as fh:
        for s0 in range(0, len(samples), per_face):
            block = samples[s0:s0 + per_face]
            fid = block[0].owner_face
            if face_id_map is not None:
                fid = face_id_map[fid]
            fh.write(struct.pack("<II", fid, r))
            for s in block:
                rgb = s.rgb if s.rgb is not None else FALLBACK_RGB
                fh.write(bytes((
                    int(rgb[0] * 255.0 + 0.5),
                    int(rgb[1] * 255.0 + 0.5),
                    int(rgb[2] * 255.0 + 0.5),
                )))


def load_mesh_colors(path):
    """Read a side-car written by save_mesh_colors.

    Returns (r, {face id: [(r, g, b), ...]}) with colors in [0, 1].
    """
    out = {}
    r = None
    with open(path, "rb") as fh:
        data = fh.read()
    off = 0
    while off < len(data):
        fid, rr = struct.unpack_from("<II", data, off)
        off += 8
        if r is None:
            r = rr
        elif rr != r:
            raise ValueError("inconsistent r across records")
        count = grid_sample_count(rr)
        colors = []
        for _ in range(count):
            colors.append((data[off] / 255.0, data[off + 1] / 255.0, data[off + 2] / 255.0))
            off += 3
        out[fid] = colors
    if off != len(data):
        raise ValueError("trailing bytes in mesh-color file")
    return r, out
