"""Fixture invariants the other suites lean on."""

import numpy as np

from decimesh.build import build_complex, connected_components
from decimesh.geom import triangle_area
from decimesh import shapes


def n_components(raw):
    mesh = build_complex(raw)
    labels = connected_components(mesh)
    return len({labels[v] for v in mesh.live_vertices()})


def test_tetrahedron():
    raw = shapes.tetrahedron()
    assert raw.faces.shape == (4, 3)
    assert raw.positions.shape == (4, 3)


def test_fin_is_non_manifold():
    mesh = build_complex(shapes.fin())
    counts = sorted(len(mesh.star_edge_faces[e]) for e in mesh.live_edges())
    assert counts[-1] == 3


def test_three_squares_sizes_and_order():
    raw = shapes.three_squares()
    assert len(raw.faces) == 6
    assert n_components(raw) == 3
    mesh = build_complex(raw)
    areas = [triangle_area(*mesh.face_points(f)) for f in mesh.live_faces()]
    # big square first (two 0.5 triangles), then two half-size squares
    assert np.allclose(areas, [0.5, 0.5, 0.125, 0.125, 0.125, 0.125])
    # larger square owns the lowest vertex ids
    assert np.allclose(raw.positions[0], [0.0, 0.0, 0.0])


def test_icosphere_face_counts():
    for subdiv in (0, 1, 2):
        raw = shapes.icosphere(subdiv=subdiv)
        assert len(raw.faces) == 20 * 4 ** subdiv
        radii = np.linalg.norm(raw.positions, axis=1)
        assert np.allclose(radii, 1.0, atol=1e-9)


def test_uv_sphere_face_count_formula():
    raw = shapes.uv_sphere(stacks=6, sectors=5)
    assert len(raw.faces) == 2 * 5 * (6 - 1) == 50
    raw = shapes.uv_sphere(stacks=4, sectors=8)
    assert len(raw.faces) == 2 * 8 * 3


def test_uv_sphere_jitter_is_radial_and_seeded():
    a = shapes.uv_sphere(stacks=5, sectors=6, jitter=0.1, seed=4)
    b = shapes.uv_sphere(stacks=5, sectors=6, jitter=0.1, seed=4)
    c = shapes.uv_sphere(stacks=5, sectors=6, jitter=0.1, seed=5)
    assert np.array_equal(a.positions, b.positions)
    assert not np.array_equal(a.positions, c.positions)


def test_t_junction_boxes_touch_without_near_vertices():
    raw = shapes.t_junction_boxes()
    assert n_components(raw) == 2
    mesh = build_complex(raw)
    labels = connected_components(mesh)
    pos = mesh.positions
    best = np.inf
    verts = list(mesh.live_vertices())
    for i in verts:
        for j in verts:
            if labels[i] != labels[j]:
                best = min(best, float(np.linalg.norm(pos[i] - pos[j])))
    assert best > 2.0


def test_two_boxes_gap():
    raw = shapes.two_boxes(gap=0.25)
    assert n_components(raw) == 2
    assert len(raw.faces) == 24


def test_two_sheets_separation_exact():
    raw = shapes.two_sheets(n=4, sep=0.05)
    n_half = len(raw.positions) // 2
    top = raw.positions[:n_half]
    bottom = raw.positions[n_half:]
    assert np.allclose(top[:, 2] - bottom[:, 2], 0.05)
    assert np.allclose(raw.vertex_colors[:n_half], [0.0, 0.0, 1.0])
    assert np.allclose(raw.vertex_colors[n_half:], [1.0, 1.0, 0.0])


def test_lifted_square_pair_offset():
    raw_a, raw_b = shapes.lifted_square_pair(d=0.25)
    assert np.allclose(raw_b.positions[:, 2] - raw_a.positions[:, 2], 0.25)
    assert np.allclose(raw_a.positions[:, :2], raw_b.positions[:, :2])


def test_duck_two_components_small_gap():
    raw = shapes.duck(subdiv=1)
    assert len(raw.faces) == 2 * 20 * 4
    assert n_components(raw) == 2
    mesh = build_complex(raw)
    # default eps (1e-3 of the diagonal) clears the neck gap of 0.0015
    assert mesh.bbox_diagonal() * 1e-3 > 0.0015


def test_random_soup_seeded():
    a = shapes.random_soup(n_faces=50, seed=1)
    b = shapes.random_soup(n_faces=50, seed=1)
    assert np.array_equal(a.positions, b.positions)
    assert len(a.faces) == 50


def test_isolated_triangles_disconnected():
    raw = shapes.isolated_triangles(n=12, seed=2)
    assert len(raw.faces) == 12
    assert n_components(raw) == 12


def test_checkerboard_texture():
    img = shapes.checkerboard(n_cells=4, cell_px=2)
    assert img.width == img.height == 8
    px = img.pixels
    assert (px[0, 0, :3] != px[0, 2, :3]).any()
    assert (px[..., 3] == 255).all()


def test_multi_island_uv_ranges_disjoint():
    raw = shapes.multi_island_textured()
    assert raw.uvs is not None
    thirds = [raw.uvs[raw.face_uvs[k * 18:(k + 1) * 18]] for k in range(3)]
    for k in range(3):
        u = thirds[k][..., 0]
        assert u.min() >= k / 3.0
        assert u.max() <= (k + 1) / 3.0
