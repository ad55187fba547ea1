"""Simplicial 2-complex bookkeeping: registration, stars, liveness."""

import numpy as np
import pytest

from decimesh.core import PHYSICAL, VIRTUAL, SimplicialComplex2


def quad_complex():
    pos = np.array([
        [0.0, 0.0, 0.0],
        [1.0, 0.0, 0.0],
        [1.0, 1.0, 0.0],
        [0.0, 1.0, 0.0],
    ])
    m = SimplicialComplex2.with_positions(pos)
    m.add_face(0, 1, 2)
    m.add_face(0, 2, 3)
    return m


def test_face_registration_creates_edges():
    m = quad_complex()
    assert m.n_live_vertices == 4
    assert m.n_live_faces == 2
    # 4 rim edges plus the shared diagonal
    assert m.n_live_edges == 5
    assert m.edge_id(0, 2) is not None
    assert m.edge_id(2, 0) == m.edge_id(0, 2)
    assert m.edge_id(1, 3) is None


def test_edge_faces_star():
    m = quad_complex()
    diag = m.edge_id(0, 2)
    assert len(m.star_edge_faces[diag]) == 2
    rim = m.edge_id(0, 1)
    assert len(m.star_edge_faces[rim]) == 1


def test_duplicate_face_raises():
    m = quad_complex()
    with pytest.raises(ValueError):
        m.add_face(2, 0, 1)  # same cycle, rotated
    assert m.n_live_faces == 2
    m.validate()


def test_degenerate_face_raises():
    m = quad_complex()
    with pytest.raises(ValueError):
        m.add_face(0, 0, 1)
    assert m.n_live_faces == 2


def test_add_edge_strict_and_kinds():
    m = quad_complex()
    with pytest.raises(ValueError):
        m.add_edge(1, 0, PHYSICAL)
    with pytest.raises(ValueError):
        m.add_edge(0, 1, VIRTUAL)
    with pytest.raises(ValueError):
        m.add_edge(2, 2, PHYSICAL)
    v = m.add_edge(1, 3, VIRTUAL)
    assert m.edge_kind[v] == VIRTUAL
    assert m.edge_id(3, 1) == v
    m.validate()


def test_validate_passes_on_fresh_mesh():
    m = quad_complex()
    m.validate()


def test_rebuild_stars_is_identity():
    m = quad_complex()
    sve = [set(s) for s in m.star_vertex_edges]
    svf = [set(s) for s in m.star_vertex_faces]
    sef = [set(s) for s in m.star_edge_faces]
    m.rebuild_stars()
    assert m.star_vertex_edges == sve
    assert m.star_vertex_faces == svf
    assert m.star_edge_faces == sef


def test_copy_is_deep():
    m = quad_complex()
    c = m.copy()
    c.positions[0, 0] = 99.0
    c.add_face(1, 2, 3)
    assert m.positions[0, 0] == 0.0
    assert m.n_live_faces == 2
    assert c.n_live_faces == 3
    m.validate()
    c.validate()


def test_face_points_matches_positions():
    m = quad_complex()
    for f in m.live_faces():
        pts = m.face_points(f)
        for p, v in zip(pts, m.faces[f]):
            assert np.allclose(p, m.positions[v])


def test_compacted_renumbers_live_only():
    m = quad_complex()
    m.add_face(1, 2, 3)
    # kill one face by hand through the public surgery path
    from decimesh.decimate import collapse_edge

    eid = m.edge_id(0, 1)
    collapse_edge(m, eid, m.positions[0])
    m.validate()
    sc, v_old, e_old, f_old = m.compacted()
    sc.validate()
    assert sc.n_live_vertices == len(v_old) == sc.positions.shape[0]
    assert sc.n_live_faces == len(f_old)
    assert all(m.vertex_alive[v] for v in v_old)
    assert all(m.face_alive[f] for f in f_old)
    # geometry carried over
    for new_f, old_f in enumerate(f_old):
        assert np.allclose(sc.face_points(new_f), m.face_points(old_f))


def test_bbox_diagonal():
    m = quad_complex()
    assert m.bbox_diagonal() == pytest.approx(np.sqrt(2.0))


def test_live_iterators_respect_alive_flags():
    m = quad_complex()
    m.face_alive[0] = False
    m.n_live_faces -= 1
    assert 0 not in set(m.live_faces())
    m.face_alive[0] = True
    m.n_live_faces += 1
    assert 0 in set(m.live_faces())
