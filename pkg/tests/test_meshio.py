"""Loader and writer round-trips for OBJ, PLY, and textures."""

import struct

import numpy as np
import pytest

from decimesh.build import build_complex
from decimesh.meshio import (
    RawMesh,
    TextureImage,
    load_mesh,
    save_mesh,
    save_raw_mesh,
)
from decimesh import shapes


def write(path, text):
    path.write_text(text)
    return path


def test_obj_basic(tmp_path):
    p = write(tmp_path / "tri.obj", """
v 0 0 0
v 1 0 0
v 0 1 0
f 1 2 3
""")
    raw = load_mesh(p)
    assert raw.positions.shape == (3, 3)
    assert raw.faces.tolist() == [[0, 1, 2]]
    assert raw.uvs is None


def test_obj_negative_indices(tmp_path):
    p = write(tmp_path / "neg.obj", """
v 0 0 0
v 1 0 0
v 0 1 0
f -3 -2 -1
""")
    raw = load_mesh(p)
    assert raw.faces.tolist() == [[0, 1, 2]]


def test_obj_polygon_fan_triangulated(tmp_path):
    p = write(tmp_path / "quad.obj", """
v 0 0 0
v 1 0 0
v 1 1 0
v 0 1 0
f 1 2 3 4
""")
    raw = load_mesh(p)
    assert raw.faces.tolist() == [[0, 1, 2], [0, 2, 3]]
    assert raw.n_polygons_triangulated == 1


def test_obj_degenerate_face_dropped(tmp_path):
    p = write(tmp_path / "degen.obj", """
v 0 0 0
v 1 0 0
v 0 1 0
f 1 1 2
f 1 2 3
""")
    raw = load_mesh(p)
    assert len(raw.faces) == 1
    assert raw.n_degenerate_dropped == 1


def test_obj_uv_corners(tmp_path):
    p = write(tmp_path / "uv.obj", """
v 0 0 0
v 1 0 0
v 0 1 0
vt 0 0
vt 1 0
vt 0 1
f 1/1 2/2 3/3
""")
    raw = load_mesh(p)
    assert raw.uvs is not None
    assert raw.face_uvs is not None
    assert raw.has_face_uvs(0)
    assert np.allclose(raw.corner_uvs(0), [[0, 0], [1, 0], [0, 1]])


def test_obj_mixed_uv_faces(tmp_path):
    p = write(tmp_path / "mixed.obj", """
v 0 0 0
v 1 0 0
v 0 1 0
v 1 1 0
vt 0 0
vt 1 0
vt 0 1
f 1/1 2/2 3/3
f 2 4 3
""")
    raw = load_mesh(p)
    assert raw.has_face_uvs(0)
    assert not raw.has_face_uvs(1)
    assert (raw.face_uvs[1] == -1).all()


def test_obj_out_of_range_index_raises(tmp_path):
    p = write(tmp_path / "bad.obj", """
v 0 0 0
v 1 0 0
f 1 2 3
""")
    with pytest.raises(ValueError):
        load_mesh(p)


def test_obj_nonfinite_raises(tmp_path):
    p = write(tmp_path / "nan.obj", """
v 0 0 nan
v 1 0 0
v 0 1 0
f 1 2 3
""")
    with pytest.raises(ValueError):
        load_mesh(p)


def test_unknown_extension_raises(tmp_path):
    p = write(tmp_path / "mesh.stl", "solid")
    with pytest.raises(ValueError):
        load_mesh(p)


def test_ply_ascii_with_colors(tmp_path):
    p = write(tmp_path / "tri.ply", """ply
format ascii 1.0
element vertex 3
property float x
property float y
property float z
property uchar red
property uchar green
property uchar blue
element face 1
property list uchar int vertex_indices
end_header
0 0 0 255 0 0
1 0 0 0 255 0
0 1 0 0 0 255
3 0 1 2
""")
    raw = load_mesh(p)
    assert raw.positions.shape == (3, 3)
    assert raw.faces.tolist() == [[0, 1, 2]]
    assert np.allclose(raw.vertex_colors[0], [1.0, 0.0, 0.0])
    assert np.allclose(raw.vertex_colors[2], [0.0, 0.0, 1.0])


def test_ply_binary_roundtrip(tmp_path):
    header = (b"ply\nformat binary_little_endian 1.0\n"
              b"element vertex 3\n"
              b"property float x\nproperty float y\nproperty float z\n"
              b"element face 1\n"
              b"property list uchar int vertex_indices\n"
              b"end_header\n")
    body = b"".join(struct.pack("<fff", *v) for v in
                    [(0, 0, 0), (1, 0, 0), (0, 1, 0)])
    body += struct.pack("<B3i", 3, 0, 1, 2)
    p = tmp_path / "bin.ply"
    p.write_bytes(header + body)
    raw = load_mesh(p)
    assert raw.positions.shape == (3, 3)
    assert raw.faces.tolist() == [[0, 1, 2]]


def test_ply_quad_triangulated(tmp_path):
    p = write(tmp_path / "quad.ply", """ply
format ascii 1.0
element vertex 4
property float x
property float y
property float z
element face 1
property list uchar int vertex_indices
end_header
0 0 0
1 0 0
1 1 0
0 1 0
4 0 1 2 3
""")
    raw = load_mesh(p)
    assert len(raw.faces) == 2
    assert raw.n_polygons_triangulated == 1


def test_save_raw_roundtrip_obj(tmp_path):
    raw = shapes.two_triangles()
    p = tmp_path / "out.obj"
    save_raw_mesh(raw, p)
    back = load_mesh(p)
    assert np.allclose(back.positions, raw.positions)
    assert (back.faces == raw.faces).all()


def test_save_raw_roundtrip_ply_colors(tmp_path):
    raw = shapes.two_sheets(n=2)
    p = tmp_path / "out.ply"
    save_raw_mesh(raw, p)
    back = load_mesh(p)
    assert np.allclose(back.positions, raw.positions, atol=1e-6)
    assert (back.faces == raw.faces).all()
    # uint8 quantization bounds the color error
    assert np.abs(back.vertex_colors - raw.vertex_colors).max() <= 0.5 / 255


def test_save_mesh_compacts_and_roundtrips(tmp_path):
    mesh = build_complex(shapes.two_triangles())
    p = tmp_path / "mesh.obj"
    save_mesh(mesh, p)
    back = load_mesh(p)
    assert back.positions.shape[0] == mesh.n_live_vertices
    assert back.faces.shape[0] == mesh.n_live_faces


def test_save_mesh_with_texture_writes_mtl(tmp_path):
    raw = shapes.textured_quad_grid(2, 2, shapes.checkerboard())
    mesh = build_complex(raw)
    uvs = np.stack([raw.uvs[raw.face_uvs[f]] for f in range(len(raw.faces))])
    p = tmp_path / "tex.obj"
    save_mesh(mesh, p, uvs=uvs, texture=raw.texture)
    assert (tmp_path / "tex.mtl").exists()
    assert (tmp_path / "tex.png").exists()
    back = load_mesh(p)
    assert back.texture is not None
    assert back.uvs is not None
    assert back.texture.width == raw.texture.width


def test_texture_sample_bilinear_center_exact():
    px = np.zeros((2, 2, 4), dtype=np.uint8)
    px[..., 3] = 255
    px[0, 0, :3] = (255, 0, 0)    # top-left in image rows
    px[1, 1, :3] = (0, 0, 255)
    img = TextureImage(pixels=px)
    # v=0 is the bottom row, so (0.25, 0.75) is the texel center of image row 0
    assert np.allclose(img.sample(0.25, 0.75), [1.0, 0.0, 0.0])
    assert np.allclose(img.sample(0.75, 0.25), [0.0, 0.0, 1.0])
    mid = img.sample(0.5, 0.5)
    assert np.allclose(mid, (np.array([1.0, 0, 0]) + [0, 0, 1]) / 4.0)


def test_texture_sample_many_matches_scalar():
    rng = np.random.default_rng(2)
    px = rng.integers(0, 256, size=(8, 8, 4)).astype(np.uint8)
    img = TextureImage(pixels=px)
    uv = rng.random((50, 2))
    many = img.sample_many(uv)
    for k in range(50):
        assert np.allclose(many[k], img.sample(*uv[k]), atol=1e-12)


def test_texture_save_load_roundtrip(tmp_path):
    img = shapes.checkerboard(n_cells=4, cell_px=4)
    p = tmp_path / "check.png"
    img.save(p)
    back = TextureImage.from_file(p)
    assert (back.pixels == img.pixels).all()
