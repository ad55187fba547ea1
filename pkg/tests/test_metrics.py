"""Sampling determinism and the three surface metrics."""

import numpy as np
import pytest

from decimesh.build import build_complex
from decimesh.core import SimplicialComplex2
from decimesh.decimate import DecimationConfig, decimate
from decimesh.metrics import (
    ColoredSurface,
    chamfer_ms,
    hausdorff,
    sample_surface,
    texture_chamfer,
)
from decimesh import shapes


def test_sample_surface_counts_and_witnesses():
    mesh = build_complex(shapes.icosphere(subdiv=1))
    s = sample_surface(mesh, n=500, seed=1)
    assert s.n_random == 500
    assert len(s.positions) == 500 + mesh.n_live_vertices
    assert not s.zero_area
    # every random sample reconstructs from its witness
    for k in range(0, 500, 37):
        pts = mesh.face_points(int(s.faces[k]))
        want = s.barys[k] @ pts
        assert np.allclose(s.positions[k], want, atol=1e-9)
    # vertex witnesses are corner indicators
    for k in range(500, len(s.positions)):
        assert s.barys[k].sum() in (0.0, 1.0)


def test_sample_surface_prefix_nested():
    mesh = build_complex(shapes.icosphere(subdiv=1))
    small = sample_surface(mesh, n=200, seed=7)
    big = sample_surface(mesh, n=1000, seed=7)
    assert np.array_equal(small.positions[:200], big.positions[:200])
    assert np.array_equal(small.faces[:200], big.faces[:200])


def test_sample_surface_seed_changes_draw():
    mesh = build_complex(shapes.icosphere(subdiv=1))
    a = sample_surface(mesh, n=100, seed=0)
    b = sample_surface(mesh, n=100, seed=1)
    assert not np.array_equal(a.positions[:100], b.positions[:100])


def test_sample_surface_zero_area_flag():
    m = SimplicialComplex2.with_positions(
        np.array([[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [2.0, 0.0, 0.0]]))
    m.add_face(0, 1, 2)  # collinear: zero area
    s = sample_surface(m, n=10)
    assert s.zero_area
    assert len(s.positions) == 3


def test_hausdorff_near_zero_on_identical_mesh():
    # closest-point recomputation rounds differently than barycentric
    # interpolation, so identical non-dyadic meshes land at fp noise
    a = build_complex(shapes.uv_sphere(stacks=6, sectors=6, jitter=0.02,
                                       seed=5))
    b = build_complex(shapes.uv_sphere(stacks=6, sectors=6, jitter=0.02,
                                       seed=5))
    assert hausdorff(a, b, n=2000) < 1e-12
    assert chamfer_ms(a, b, n=2000) < 1e-24


def test_hausdorff_exact_on_lifted_square():
    raw_a, raw_b = shapes.lifted_square_pair(d=0.25)
    a = build_complex(raw_a)
    b = build_complex(raw_b)
    assert hausdorff(a, b, n=5000) == 0.25
    assert chamfer_ms(a, b, n=5000) == 0.25 ** 2


def test_hausdorff_symmetry():
    a = build_complex(shapes.icosphere(subdiv=1))
    m = build_complex(shapes.icosphere(subdiv=1))
    decimate(m, DecimationConfig(target_face_count=30))
    assert hausdorff(a, m, n=3000) == hausdorff(m, a, n=3000)


def test_hausdorff_monotone_in_sample_count():
    a = build_complex(shapes.icosphere(subdiv=2))
    m = build_complex(shapes.icosphere(subdiv=2))
    decimate(m, DecimationConfig(target_face_count=60))
    d_small = hausdorff(a, m, n=500, seed=3)
    d_big = hausdorff(a, m, n=5000, seed=3)
    # prefix nesting: more samples can only grow the max
    assert d_big >= d_small


def test_normalize_divides_by_union_diagonal():
    raw_a, raw_b = shapes.lifted_square_pair(d=0.25)
    a = build_complex(raw_a)
    b = build_complex(raw_b)
    lo = np.minimum(a.positions.min(axis=0), b.positions.min(axis=0))
    hi = np.maximum(a.positions.max(axis=0), b.positions.max(axis=0))
    diag = float(np.linalg.norm(hi - lo))
    d = hausdorff(a, b, n=1000, normalize=True)
    assert d == pytest.approx(0.25 / diag, rel=1e-12)
    c = chamfer_ms(a, b, n=1000, normalize=True)
    assert c == pytest.approx(0.25 ** 2 / diag ** 2, rel=1e-12)


def test_decimated_sphere_error_small_and_positive():
    a = build_complex(shapes.icosphere(subdiv=2))
    m = build_complex(shapes.icosphere(subdiv=2))
    decimate(m, DecimationConfig(target_face_count=80))
    d = hausdorff(a, m, n=4000)
    assert 0.0 < d < 0.2
    c = chamfer_ms(a, m, n=4000)
    assert 0.0 < c < d * d + 1e-12


def test_colored_surface_from_raw_requires_colors():
    raw = shapes.unit_square()
    surf = ColoredSurface.from_raw(raw)
    assert not surf.has_colors
    with pytest.raises(ValueError):
        surf.color_at(0, (1.0, 0.0, 0.0))


def test_texture_chamfer_identical_colors_near_zero():
    a = ColoredSurface.from_raw(shapes.two_sheets(n=3))
    b = ColoredSurface.from_raw(shapes.two_sheets(n=3))
    assert texture_chamfer(a, b, n=2000) < 1e-12


def test_texture_chamfer_red_vs_blue_is_sqrt2():
    red = ColoredSurface.from_raw(shapes.solid_color_square((1.0, 0.0, 0.0)))
    blue = ColoredSurface.from_raw(shapes.solid_color_square((0.0, 0.0, 1.0)))
    err = texture_chamfer(red, blue, n=2000)
    assert abs(err - np.sqrt(2.0)) < 1e-12


def test_texture_chamfer_uses_vertex_interpolation():
    # one square fades red to black along x, the other is all black:
    # the error must fall strictly between the extremes
    raw_a = shapes.unit_square()
    raw_a.vertex_colors = np.array([
        [0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 0.0, 0.0],
    ])
    raw_b = shapes.unit_square()
    raw_b.vertex_colors = np.zeros((4, 3))
    a = ColoredSurface.from_raw(raw_a)
    b = ColoredSurface.from_raw(raw_b)
    err = texture_chamfer(a, b, n=4000)
    assert 0.1 < err < 1.0
