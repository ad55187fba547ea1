"""Procedural fixtures: spheres, grids, boxes, soups, and a duck.

Everything returns a RawMesh (or a TextureImage) so the fixtures flow
through the same build path as loaded files.  Geometry is exact where
tests rely on it: grids share corner coordinates, gaps are literal.
"""

from __future__ import annotations

import math

import numpy as np

from .meshio import RawMesh, TextureImage


def _raw(positions, faces, **kw) -> RawMesh:
    return RawMesh(
        positions=np.asarray(positions, dtype=np.float64),
        faces=np.asarray(faces, dtype=np.int64).reshape(-1, 3),
        **kw,
    )


def combine(*meshes: RawMesh) -> RawMesh:
    """Concatenate raw meshes, offsetting indices.

    Vertex colors survive only if every part has them; UV data is
    merged when every part has it.
    """
    positions = []
    faces = []
    colors = []
    uvs = []
    face_uvs = []
    has_colors = all(m.vertex_colors is not None for m in meshes)
    has_uvs = all(m.uvs is not None and m.face_uvs is not None for m in meshes)
    voff = 0
    toff = 0
    for m in meshes:
        positions.append(m.positions)
        faces.append(m.faces + voff)
        if has_colors:
            colors.append(m.vertex_colors)
        if has_uvs:
            uvs.append(m.uvs)
            face_uvs.append(np.where(m.face_uvs >= 0, m.face_uvs + toff, -1))
            toff += len(m.uvs)
        voff += len(m.positions)
    return RawMesh(
        positions=np.concatenate(positions),
        faces=np.concatenate(faces),
        uvs=np.concatenate(uvs) if has_uvs else None,
        face_uvs=np.concatenate(face_uvs) if has_uvs else None,
        vertex_colors=np.concatenate(colors) if has_colors else None,
        texture=next((m.texture for m in meshes if m.texture is not None), None),
    )


def translate(mesh: RawMesh, offset) -> RawMesh:
    mesh.positions = mesh.positions + np.asarray(offset, dtype=np.float64)
    return mesh


def tetrahedron() -> RawMesh:
    return _raw(
        [[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1]],
        [[0, 2, 1], [0, 1, 3], [1, 2, 3], [0, 3, 2]],
    )


def two_triangles() -> RawMesh:
    """Two faces sharing one edge."""
    return _raw(
        [[0, 0, 0], [1, 0, 0], [0.5, 1, 0], [0.5, -1, 0]],
        [[0, 1, 2], [1, 0, 3]],
    )


def fin() -> RawMesh:
    """Non-manifold: three faces hanging off one shared edge."""
    return _raw(
        [[0, 0, 0], [1, 0, 0], [0.5, 1, 0], [0.5, -1, 0], [0.5, 0, 1]],
        [[0, 1, 2], [1, 0, 3], [0, 1, 4]],
    )


def unit_square(z: float = 0.0, size: float = 1.0, origin=(0.0, 0.0)) -> RawMesh:
    x0, y0 = origin
    return _raw(
        [[x0, y0, z], [x0 + size, y0, z], [x0 + size, y0 + size, z], [x0, y0 + size, z]],
        [[0, 1, 2], [0, 2, 3]],
    )


def solid_color_square(rgb, z: float = 0.0) -> RawMesh:
    mesh = unit_square(z=z)
    mesh.vertex_colors = np.tile(np.asarray(rgb, dtype=np.float64), (4, 1))
    return mesh


def quad_grid(nx: int, ny: int, size: float = 1.0, z: float = 0.0,
              with_uvs: bool = False, uv_rect=(0.0, 0.0, 1.0, 1.0)) -> RawMesh:
    """nx-by-ny cell grid in the z plane, 2 triangles per cell.

    with_uvs maps the grid onto uv_rect = (u0, v0, u1, v1), one UV per
    vertex.
    """
    xs = np.linspace(0.0, size, nx + 1)
    ys = np.linspace(0.0, size, ny + 1)
    positions = []
    uvs = []
    u0, v0, u1, v1 = uv_rect
    for jy in range(ny + 1):
        for ix in range(nx + 1):
            positions.append((xs[ix], ys[jy], z))
            uvs.append((u0 + (u1 - u0) * ix / nx, v0 + (v1 - v0) * jy / ny))
    faces = []
    for jy in range(ny):
        for ix in range(nx):
            a = jy * (nx + 1) + ix
            b = a + 1
            c = a + nx + 2
            d = a + nx + 1
            faces.append((a, b, c))
            faces.append((a, c, d))
    mesh = _raw(positions, faces)
    if with_uvs:
        mesh.uvs = np.asarray(uvs, dtype=np.float64)
        mesh.face_uvs = mesh.faces.copy()
    return mesh


def lifted_square_pair(d: float = 0.25):
    """Unit square and the same square lifted by d: hausdorff is d."""
    return unit_square(z=0.0), unit_square(z=d)


def three_squares(sizes=(1.0, 0.5, 0.5), gap: float = 0.05) -> RawMesh:
    """Disconnected coplanar squares in a row, largest first.

    The size spread matters: demolishing a square costs roughly
    side**4 under the area penalty, so an area-aware pass eats the
    small ones and keeps the big one, while an area-blind pass
    collapses in id order and destroys the big square first.
    """
    parts = []
    x = 0.0
    for s in sizes:
        parts.append(unit_square(size=s, origin=(x, 0.0)))
        x += s + gap
    return combine(*parts)


def box(center=(0.0, 0.0, 0.0), size=(1.0, 1.0, 1.0)) -> RawMesh:
    cx, cy, cz = center
    hx, hy, hz = size[0] / 2.0, size[1] / 2.0, size[2] / 2.0
    corners = [
        (cx - hx, cy - hy, cz - hz), (cx + hx, cy - hy, cz - hz),
        (cx + hx, cy + hy, cz - hz), (cx - hx, cy + hy, cz - hz),
        (cx - hx, cy - hy, cz + hz), (cx + hx, cy - hy, cz + hz),
        (cx + hx, cy + hy, cz + hz), (cx - hx, cy + hy, cz + hz),
    ]
    quads = [
        (0, 3, 2, 1), (4, 5, 6, 7), (0, 1, 5, 4),
        (1, 2, 6, 5), (2, 3, 7, 6), (3, 0, 4, 7),
    ]
    faces = []
    for a, b, c, d in quads:
        faces.append((a, b, c))
        faces.append((a, c, d))
    return _raw(corners, faces)


def t_junction_boxes() -> RawMesh:
    """A small box resting flush on a large box's top: a T-junction.

    The contact is face-against-face with no shared vertices; the
    closest vertex pair across the components is over two units apart
    while the triangle-to-triangle distance is exactly zero.
    """
    big = box(center=(0.0, 0.0, 0.0), size=(4.0, 4.0, 2.0))
    small = box(center=(0.0, 0.0, 1.5), size=(1.0, 1.0, 1.0))
    return combine(big, small)


def two_boxes(gap: float = 0.002, size: float = 1.0) -> RawMesh:
    """Two axis-aligned cubes separated by a small gap along x."""
    a = box(center=(0.0, 0.0, 0.0), size=(size, size, size))
    b = box(center=(size + gap, 0.0, 0.0), size=(size, size, size))
    return combine(a, b)


def icosphere(subdiv: int = 1, radius: float = 1.0, center=(0.0, 0.0, 0.0),
              scale=(1.0, 1.0, 1.0)) -> RawMesh:
    """Subdivided icosahedron: 20 * 4**subdiv faces."""
    t = (1.0 + math.sqrt(5.0)) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    norm = math.sqrt(1.0 + t * t)
    verts = [(x / norm, y / norm, z / norm) for x, y, z in verts]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    for _ in range(subdiv):
        cache = {}
        new_faces = []

        def midpoint(a, b):
            key = (a, b) if a < b else (b, a)
            got = cache.get(key)
            if got is not None:
                return got
            ax, ay, az = verts[a]
            bx, by, bz = verts[b]
            mx, my, mz = (ax + bx) / 2, (ay + by) / 2, (az + bz) / 2
            n = math.sqrt(mx * mx + my * my + mz * mz)
            verts.append((mx / n, my / n, mz / n))
            cache[key] = len(verts) - 1
            return cache[key]

        for a, b, c in faces:
            ab = midpoint(a, b)
            bc = midpoint(b, c)
            ca = midpoint(c, a)
            new_faces += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = new_faces
    positions = np.asarray(verts, dtype=np.float64)
    positions = positions * radius * np.asarray(scale, dtype=np.float64)
    positions = positions + np.asarray(center, dtype=np.float64)
    return _raw(positions, faces)


def uv_sphere(stacks: int = 6, sectors: int = 5, radius: float = 1.0,
              jitter: float = 0.0, seed: int = 0) -> RawMesh:
    """Closed pole-capped sphere with 2 * sectors * (stacks - 1) faces.

    jitter displaces every vertex radially by up to +-jitter (seeded),
    which breaks symmetry ties without opening the surface.
    """
    rng = np.random.default_rng(seed)
    verts = [(0.0, 0.0, radius)]
    for s in range(1, stacks):
        phi = math.pi * s / stacks
        for m in range(sectors):
            theta = 2.0 * math.pi * m / sectors
            verts.append((
                radius * math.sin(phi) * math.cos(theta),
                radius * math.sin(phi) * math.sin(theta),
                radius * math.cos(phi),
            ))
    verts.append((0.0, 0.0, -radius))
    bottom = len(verts) - 1
    faces = []
    for m in range(sectors):
        faces.append((0, 1 + m, 1 + (m + 1) % sectors))
    for s in range(stacks - 2):
        row0 = 1 + s * sectors
        row1 = row0 + sectors
        for m in range(sectors):
            a = row0 + m
            b = row0 + (m + 1) % sectors
            c = row1 + (m + 1) % sectors
            d = row1 + m
            faces.append((a, b, c))
            faces.append((a, c, d))
    last = 1 + (stacks - 2) * sectors
    for m in range(sectors):
        faces.append((bottom, last + (m + 1) % sectors, last + m))
    positions = np.asarray(verts, dtype=np.float64)
    if jitter > 0.0:
        scale = 1.0 + jitter * (2.0 * rng.random(len(positions)) - 1.0)
        positions = positions * scale[:, None]
    return _raw(positions, faces)


def two_sheets(n: int = 24, size: float = 2.0, amp: float = 0.15,
               sep: float = 0.05) -> RawMesh:
    """Two stacked wavy sheets: blue on top, yellow below.

    The sheets share the wave field and differ only by a constant z
    offset, so the true inter-sheet distance is sep everywhere.
    """
    def sheet(z0, rgb):
        mesh = quad_grid(n, n, size=size)
        xy = mesh.positions[:, :2]
        wave = amp * np.sin(2.0 * np.pi * xy[:, 0] / size) * np.cos(
            2.0 * np.pi * xy[:, 1] / size)
        mesh.positions[:, 2] = z0 + wave
        mesh.vertex_colors = np.tile(np.asarray(rgb, dtype=np.float64),
                                     (len(mesh.positions), 1))
        return mesh

    return combine(sheet(sep, (0.0, 0.0, 1.0)), sheet(0.0, (1.0, 1.0, 0.0)))


def isolated_triangles(n: int = 20, seed: int = 0) -> RawMesh:
    """n disconnected triangles scattered in the unit cube."""
    rng = np.random.default_rng(seed)
    centers = rng.random((n, 3))
    positions = []
    faces = []
    for k in range(n):
        base = centers[k]
        tri = base + 0.05 * (rng.random((3, 3)) - 0.5)
        idx = len(positions)
        positions.extend(tri.tolist())
        faces.append((idx, idx + 1, idx + 2))
    return _raw(positions, faces)


def random_soup(n_faces: int = 1200, seed: int = 0) -> RawMesh:
    """Random triangle soup: overlapping, non-manifold, multi-component."""
    rng = np.random.default_rng(seed)
    centers = rng.random((n_faces, 3))
    offsets = 0.15 * (rng.random((n_faces, 3, 3)) - 0.5)
    tris = centers[:, None, :] + offsets
    positions = tris.reshape(-1, 3)
    faces = np.arange(n_faces * 3, dtype=np.int64).reshape(-1, 3)
    return _raw(positions, faces)


def duck(subdiv: int = 3, gap: float = 0.0015) -> RawMesh:
    """Duck-ish two-component blob: ellipsoid body plus sphere head.

    Total faces: 2 * 20 * 4**subdiv.  The head floats gap above the
    body pole, within the default virtual-edge epsilon for this size.
    """
    body = icosphere(subdiv, scale=(1.4, 1.0, 1.0))
    head = icosphere(subdiv, radius=0.45, center=(0.0, 1.45 + gap, 0.0))
    return combine(body, head)


def checkerboard(n_cells: int = 8, cell_px: int = 8,
                 color_a=(0, 0, 0), color_b=(255, 255, 255)) -> TextureImage:
    side = n_cells * cell_px
    pixels = np.zeros((side, side, 4), dtype=np.uint8)
    ys, xs = np.meshgrid(np.arange(side), np.arange(side), indexing="ij")
    parity = ((xs // cell_px) + (ys // cell_px)) % 2
    pixels[..., :3] = np.where(parity[..., None] == 0,
                               np.asarray(color_a, dtype=np.uint8),
                               np.asarray(color_b, dtype=np.uint8))
    pixels[..., 3] = 255
    return TextureImage(pixels=pixels)


def textured_quad_grid(nx: int = 8, ny: int = 8,
                       texture: TextureImage | None = None) -> RawMesh:
    mesh = quad_grid(nx, ny, with_uvs=True)
    mesh.texture = texture if texture is not None else checkerboard()
    return mesh


def multi_island_textured(gap: float = 0.4) -> RawMesh:
    """Three separated textured patches using disjoint UV islands."""
    texture = checkerboard(n_cells=12, cell_px=8,
                           color_a=(200, 40, 40), color_b=(40, 40, 200))
    parts = []
    for k in range(3):
        rect = (k / 3.0 + 0.02, 0.1, (k + 1) / 3.0 - 0.02, 0.9)
        part = quad_grid(3, 3, with_uvs=True, uv_rect=rect)
        translate(part, (k * (1.0 + gap), 0.0, 0.1 * k))
        parts.append(part)
    mesh = combine(*parts)
    mesh.texture = texture
    return mesh
