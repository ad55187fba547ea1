"""Mesh and texture I/O: OBJ, PLY, PNG, MTL.

Loading never welds vertices (welding is a build-time decision) and
rejects non-finite coordinates.  Degenerate faces are dropped with a
counter, polygons are fan-triangulated with a counter.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .core import SimplicialComplex2


@dataclass
class TextureImage:
    """RGBA8 image; row 0 is the top row, v = 0 is the bottom edge."""

    pixels: np.ndarray  # (H, W, 4) uint8

    def __post_init__(self) -> None:
        px = np.asarray(self.pixels)
        if px.ndim != 3 or px.shape[2] != 4 or px.dtype != np.uint8:
            raise ValueError("pixels must be (H, W, 4) uint8")
        if px.shape[0] < 1 or px.shape[1] < 1:
            raise ValueError("width and height must be >= 1")
        self.pixels = px

    @property
    def width(self) -> int:
        return self.pixels.shape[1]

    @property
    def height(self) -> int:
        return self.pixels.shape[0]

    @classmethod
    def from_file(cls, path) -> "TextureImage":
        img = Image.open(path).convert("RGBA")
        return cls(np.asarray(img, dtype=np.uint8).copy())

    def save(self, path) -> None:
        Image.fromarray(self.pixels, "RGBA").save(path)

    def sample(self, u: float, v: float) -> np.ndarray:
        return self.sample_many(np.array([[u, v]]))[0]

    def sample_many(self, uv) -> np.ndarray:
        """Bilinear RGB lookup in [0,1]^3 with repeat wrap.

        Texel centers sit at (i + 0.5) / W horizontally; v runs bottom
        to top while pixel rows run top to bottom.
        """
        uv = np.asarray(uv, dtype=np.float64).reshape(-1, 2)
        h, w = self.pixels.shape[:2]
        x = uv[:, 0] * w - 0.5
        y = (1.0 - uv[:, 1]) * h - 0.5
        x0 = np.floor(x)
        y0 = np.floor(y)
        fx = (x - x0)[:, None]
        fy = (y - y0)[:, None]
        x0 = x0.astype(np.int64) % w
        y0 = y0.astype(np.int64) % h
        x1 = (x0 + 1) % w
        y1 = (y0 + 1) % h
        rgb = self.pixels[..., :3].astype(np.float64) / 255.0
        c00 = rgb[y0, x0]
        c01 = rgb[y0, x1]
        c10 = rgb[y1, x0]
        c11 = rgb[y1, x1]
        top = c00 * (1.0 - fx) + c01 * fx
        bot = c10 * (1.0 - fx) + c11 * fx
        return top * (1.0 - fy) + bot * fy


def sample_texture(img: TextureImage, uv) -> np.ndarray:
    """Bilinear RGB sample at uv, values in [0, 1]."""
    return img.sample(float(uv[0]), float(uv[1]))


@dataclass
class RawMesh:
    """Indexed triangle mesh as loaded, before any welding."""

    positions: np.ndarray  # (V, 3) float64
    faces: np.ndarray  # (F, 3) int64
    uvs: np.ndarray | None = None  # (T, 2) float64 pool
    face_uvs: np.ndarray | None = None  # (F, 3) indices into uvs, -1 absent
    texture: TextureImage | None = None
    vertex_colors: np.ndarray | None = None  # (V, 3) float64 in [0,1]
    lines: list = field(default_factory=list)  # extra (i, j) edge records
    n_degenerate_dropped: int = 0
    n_polygons_triangulated: int = 0

    def has_face_uvs(self, f: int) -> bool:
        return self.face_uvs is not None and bool((self.face_uvs[f] >= 0).all())

    def corner_uvs(self, f: int) -> np.ndarray:
        return self.uvs[self.face_uvs[f]]


def _fan_triangulate(indices, out_faces, raw: RawMesh, uv_row=None, out_uv_rows=None):
    for k in range(1, len(indices) - 1):
        tri = (indices[0], indices[k], indices[k + 1])
        if tri[0] == tri[1] or tri[1] == tri[2] or tri[0] == tri[2]:
            raw.n_degenerate_dropped += 1
            continue
        out_faces.append(tri)
        if out_uv_rows is not None:
            if uv_row is None:
                out_uv_rows.append((-1, -1, -1))
            else:
                out_uv_rows.append((uv_row[0], uv_row[k], uv_row[k + 1]))


def _resolve_index(tok: int, count: int, lineno: int, path) -> int:
    # OBJ indices are 1-based; negatives count back from the end.
    if tok > 0:
        idx = tok - 1
    elif tok < 0:
        idx = count + tok
    else:
        raise ValueError(f"{path}:{lineno}: index 0 is invalid")
    if idx < 0 or idx >= count:
        raise ValueError(f"{path}:{lineno}: index {tok} out of range")
    return idx


def _load_obj(path: Path) -> RawMesh:
    positions: list = []
    colors: list = []
    uvs: list = []
    faces: list = []
    face_uv_rows: list = []
    lines: list = []
    mtllibs: list = []
    raw = RawMesh(positions=np.zeros((0, 3)), faces=np.zeros((0, 3), dtype=np.int64))

    with open(path, "r", errors="replace") as fh:
        for lineno, line in enumerate(fh, start=1):
            if "#" in line:
                line = line.split("#", 1)[0]
            parts = line.split()
            if not parts:
                continue
            tag = parts[0]
            try:
                if tag == "v":
                    if len(parts) < 4:
                        raise ValueError("vertex needs 3 coordinates")
                    xyz = [float(parts[1]), float(parts[2]), float(parts[3])]
                    if not all(np.isfinite(xyz)):
                        raise ValueError("non-finite coordinate")
                    positions.append(xyz)
                    if len(parts) >= 7:
                        colors.append([float(parts[4]), float(parts[5]), float(parts[6])])
                    else:
                        colors.append(None)
                elif tag == "vt":
                    if len(parts) < 3:
                        raise ValueError("vt needs 2 coordinates")
                    uvs.append([float(parts[1]), float(parts[2])])
                elif tag == "f":
                    if len(parts) < 4:
                        raise ValueError("face needs at least 3 vertices")
                    vidx = []
                    tidx = []
                    for tok in parts[1:]:
                        fields = tok.split("/")
                        vidx.append(_resolve_index(int(fields[0]), len(positions), lineno, path))
                        if len(fields) > 1 and fields[1]:
                            tidx.append(_resolve_index(int(fields[1]), len(uvs), lineno, path))
                        else:
                            tidx.append(-1)
                    if len(vidx) > 3:
                        raw.n_polygons_triangulated += 1
                    _fan_triangulate(vidx, faces, raw, tidx, face_uv_rows)
                elif tag == "l":
                    idx = [_resolve_index(int(t.split("/")[0]), len(positions), lineno, path)
                           for t in parts[1:]]
                    for k in range(len(idx) - 1):
                        if idx[k] != idx[k + 1]:
                            lines.append((idx[k], idx[k + 1]))
                elif tag == "mtllib":
                    mtllibs.append(" ".join(parts[1:]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None

    raw.positions = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
    raw.faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    raw.lines = lines
    if uvs:
        raw.uvs = np.asarray(uvs, dtype=np.float64)
        raw.face_uvs = np.asarray(face_uv_rows, dtype=np.int64).reshape(-1, 3)
    if any(c is not None for c in colors):
        raw.vertex_colors = np.array(
            [c if c is not None else [1.0, 1.0, 1.0] for c in colors], dtype=np.float64
        )
    tex = _find_texture(path, mtllibs)
    if tex is not None:
        raw.texture = tex
    return raw


def _find_texture(obj_path: Path, mtllibs: list) -> TextureImage | None:
    for lib in mtllibs:
        mtl_path = obj_path.parent / lib
        if not mtl_path.exists():
            continue
        with open(mtl_path, "r", errors="replace") as fh:
            for line in fh:
                parts = line.split()
                if len(parts) >= 2 and parts[0] == "map_Kd":
                    tex_path = obj_path.parent / parts[-1]
                    if tex_path.exists():
                        return TextureImage.from_file(tex_path)
    return None


_PLY_TYPES = {
    "char": "b", "int8": "b",
    "uchar": "B", "uint8": "B",
    "short": "h", "int16": "h",
    "ushort": "H", "uint16": "H",
    "int": "i", "int32": "i",
    "uint": "I", "uint32": "I",
    "float": "f", "float32": "f",
    "double": "d", "float64": "d",
}


def _load_ply(path: Path) -> RawMesh:
    with open(path, "rb") as fh:
        data = fh.read()
    if not data.startswith(b"ply"):
        raise ValueError(f"{path}:1: not a PLY file")
    end = data.find(b"end_header")
    if end < 0:
        raise ValueError(f"{path}: missing end_header")
    nl = data.find(b"\n", end)
    header = data[:nl].decode("ascii", errors="replace").splitlines()
    body = data[nl + 1:]

    fmt = None
    elements: list = []  # (name, count, [(prop_name, type, list_count_type|None)])
    for lineno, line in enumerate(header, start=1):
        parts = line.split()
        if not parts or parts[0] in ("ply", "comment", "obj_info", "end_header"):
            continue
        if parts[0] == "format":
            fmt = parts[1]
            if fmt not in ("ascii", "binary_little_endian"):
                raise ValueError(f"{path}:{lineno}: unsupported format {fmt}")
        elif parts[0] == "element":
            elements.append((parts[1], int(parts[2]), []))
        elif parts[0] == "property":
            if not elements:
                raise ValueError(f"{path}:{lineno}: property before element")
            if parts[1] == "list":
                elements[-1][2].append((parts[4], parts[3], parts[2]))
            else:
                elements[-1][2].append((parts[2], parts[1], None))
    if fmt is None:
        raise ValueError(f"{path}: missing format line")

    parsed: dict = {}
    if fmt == "ascii":
        tokens = body.decode("ascii", errors="replace").split()
        pos = 0
        for name, count, props in elements:
            rows = []
            for _ in range(count):
                row = {}
                for pname, ptype, ltype in props:
                    if ltype is None:
                        row[pname] = float(tokens[pos]); pos += 1
                    else:
                        n = int(tokens[pos]); pos += 1
                        row[pname] = [int(float(tokens[pos + k])) for k in range(n)]
                        pos += n
                rows.append(row)
            parsed[name] = rows
    else:
        offset = 0
        for name, count, props in elements:
            rows = []
            for _ in range(count):
                row = {}
                for pname, ptype, ltype in props:
                    if ltype is None:
                        code = _PLY_TYPES[ptype]
                        (val,) = struct.unpack_from("<" + code, body, offset)
                        offset += struct.calcsize(code)
                        row[pname] = float(val)
                    else:
                        ccode = _PLY_TYPES[ltype]
                        (n,) = struct.unpack_from("<" + ccode, body, offset)
                        offset += struct.calcsize(ccode)
                        icode = _PLY_TYPES[ptype]
                        vals = struct.unpack_from("<" + str(n) + icode, body, offset)
                        offset += n * struct.calcsize(icode)
                        row[pname] = [int(v) for v in vals]
                rows.append(row)
            parsed[name] = rows

    if "vertex" not in parsed:
        raise ValueError(f"{path}: no vertex element")
    verts = parsed["vertex"]
    positions = np.array([[r["x"], r["y"], r["z"]] for r in verts], dtype=np.float64)
    if not np.isfinite(positions).all():
        raise ValueError(f"{path}: non-finite coordinate")
    raw = RawMesh(positions=positions, faces=np.zeros((0, 3), dtype=np.int64))
    if verts and all(k in verts[0] for k in ("red", "green", "blue")):
        raw.vertex_colors = np.array(
            [[r["red"], r["green"], r["blue"]] for r in verts], dtype=np.float64
        ) / 255.0

    faces: list = []
    for r in parsed.get("face", []):
        idx = r.get("vertex_indices", r.get("vertex_index"))
        if idx is None:
            raise ValueError(f"{path}: face element lacks vertex indices")
        for k in idx:
            if k < 0 or k >= len(positions):
                raise ValueError(f"{path}: face index {k} out of range")
        if len(idx) > 3:
            raw.n_polygons_triangulated += 1
        _fan_triangulate(idx, faces, raw)
    raw.faces = np.asarray(faces, dtype=np.int64).reshape(-1, 3)
    return raw


def load_mesh(path) -> RawMesh:
    """Load an OBJ or PLY file into a RawMesh."""
    path = Path(path)
    if not path.exists():
        raise FileNotFoundError(f"no such file: {path}")
    ext = path.suffix.lower()
    if ext == ".obj":
        return _load_obj(path)
    if ext == ".ply":
        return _load_ply(path)
    raise ValueError(f"unsupported mesh format: {path.suffix}")


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_obj(path: Path, positions, faces, uvs=None, texture=None,
               line_edges=(), vertex_colors=None) -> None:
    mtl_path = path.with_suffix(".mtl")
    png_path = path.with_suffix(".png")
    with open(path, "w") as fh:
        fh.write("# decimesh mesh\n")
        if texture is not None:
            fh.write(f"mtllib {mtl_path.name}\n")
        for i, p in enumerate(positions):
            if vertex_colors is not None:
                c = vertex_colors[i]
                fh.write(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])} "
                         f"{_fmt(c[0])} {_fmt(c[1])} {_fmt(c[2])}\n")
            else:
                fh.write(f"v {_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}\n")
        if uvs is not None:
            # One vt per corner, in face order.
            for row in uvs:
                for u, v in row:
                    fh.write(f"vt {_fmt(u)} {_fmt(v)}\n")
        if texture is not None:
            fh.write("usemtl material_0\n")
        if uvs is not None:
            for f, (a, b, c) in enumerate(faces):
                t = 3 * f
                fh.write(f"f {a + 1}/{t + 1} {b + 1}/{t + 2} {c + 1}/{t + 3}\n")
        else:
            for a, b, c in faces:
                fh.write(f"f {a + 1} {b + 1} {c + 1}\n")
        for i, j in line_edges:
            fh.write(f"l {i + 1} {j + 1}\n")
    if texture is not None:
        with open(mtl_path, "w") as fh:
            fh.write("newmtl material_0\nKd 1 1 1\n")
            fh.write(f"map_Kd {png_path.name}\n")
        texture.save(png_path)


def _write_ply(path: Path, positions, faces, vertex_colors=None) -> None:
    with open(path, "w") as fh:
        fh.write("ply\nformat ascii 1.0\n")
        fh.write(f"element vertex {len(positions)}\n")
        fh.write("property double x\nproperty double y\nproperty double z\n")
        if vertex_colors is not None:
            fh.write("property uchar red\nproperty uchar green\nproperty uchar blue\n")
        fh.write(f"element face {len(faces)}\n")
        fh.write("property list uchar int vertex_indices\n")
        fh.write("end_header\n")
        for i, p in enumerate(positions):
            line = f"{_fmt(p[0])} {_fmt(p[1])} {_fmt(p[2])}"
            if vertex_colors is not None:
                c = np.clip(np.round(np.asarray(vertex_colors[i]) * 255), 0, 255).astype(int)
                line += f" {c[0]} {c[1]} {c[2]}"
            fh.write(line + "\n")
        for a, b, c in faces:
            fh.write(f"3 {a} {b} {c}\n")


def save_mesh(mesh: SimplicialComplex2, path, uvs=None, texture=None) -> None:
    """Save a compacted complex as OBJ (or PLY when the suffix is .ply).

    ``uvs`` is (F, 3, 2) per-corner texture coordinates.  Physical edges
    without incident faces are emitted as OBJ line records so 1-complex
    results survive a round trip.
    """
    if not all(mesh.vertex_alive) or not all(mesh.edge_alive) or not all(mesh.face_alive):
        raise ValueError("mesh must be compacted before saving")
    path = Path(path)
    positions = mesh.positions
    faces = list(mesh.faces)
    ext = path.suffix.lower()
    if ext == ".ply":
        if texture is not None or uvs is not None:
            raise ValueError("textured output requires OBJ")
        _write_ply(path, positions, faces)
        return
    if ext != ".obj":
        raise ValueError(f"unsupported mesh format: {path.suffix}")
    from .core import PHYSICAL

    dangling = [
        mesh.edges[e]
        for e in range(len(mesh.edges))
        if not mesh.star_edge_faces[e] and mesh.edge_kind[e] == PHYSICAL
    ]
    _write_obj(path, positions, faces, uvs=uvs, texture=texture, line_edges=dangling)


def save_raw_mesh(raw: RawMesh, path) -> None:
    """Save a RawMesh; OBJ keeps UVs/texture, PLY keeps vertex colors."""
    path = Path(path)
    ext = path.suffix.lower()
    if ext == ".obj":
        uvs = None
        if raw.uvs is not None and raw.face_uvs is not None:
            uvs = np.where(
                (raw.face_uvs >= 0)[:, :, None],
                raw.uvs[np.clip(raw.face_uvs, 0, None)],
                0.0,
            )
        _write_obj(path, raw.positions, raw.faces, uvs=uvs, texture=raw.texture,
                   line_edges=raw.lines, vertex_colors=raw.vertex_colors)
    elif ext == ".ply":
        _write_ply(path, raw.positions, raw.faces, vertex_colors=raw.vertex_colors)
    else:
        raise ValueError(f"unsupported mesh format: {path.suffix}")
