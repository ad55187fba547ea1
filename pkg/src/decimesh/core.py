"""Core geometric and combinatorial types.

A quadric is the triplet (A, b, c) of a quadratic error functional
E(x) = x^T A x + 2 b^T x + c on points in R^3, with A symmetric and
stored as its 6 unique entries.

A simplicial 2-complex holds vertices, edges (physical or virtual) and
triangular faces, together with three star indices: vertex -> incident
edges, vertex -> incident faces, edge -> incident faces.  Elements are
deleted by clearing an alive flag; ids stay stable so that collapse
records can replay or undo any decimation step.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

PHYSICAL = 0
VIRTUAL = 1


@dataclass(frozen=True, slots=True)
class Quadric:
    """Quadratic error functional E(x) = x^T A x + 2 b^T x + c.

    The symmetric matrix A is stored as its six unique entries.
    Addition is component-wise; scaling multiplies every component.
    """

    axx: float = 0.0
    axy: float = 0.0
    axz: float = 0.0
    ayy: float = 0.0
    ayz: float = 0.0
    azz: float = 0.0
    bx: float = 0.0
    by: float = 0.0
    bz: float = 0.0
    c: float = 0.0

    def __add__(self, o: "Quadric") -> "Quadric":
        return Quadric(
            self.axx + o.axx, self.axy + o.axy, self.axz + o.axz,
            self.ayy + o.ayy, self.ayz + o.ayz, self.azz + o.azz,
            self.bx + o.bx, self.by + o.by, self.bz + o.bz,
            self.c + o.c,
        )

    def scaled(self, s: float) -> "Quadric":
        return Quadric(
            self.axx * s, self.axy * s, self.axz * s,
            self.ayy * s, self.ayz * s, self.azz * s,
            self.bx * s, self.by * s, self.bz * s,
            self.c * s,
        )

    def evaluate(self, point) -> float:
        """Error value at a 3D point (any 3-sequence)."""
        x, y, z = float(point[0]), float(point[1]), float(point[2])
        return (
            x * (self.axx * x + 2.0 * (self.axy * y + self.axz * z))
            + y * (self.ayy * y + 2.0 * self.ayz * z)
            + z * self.azz * z
            + 2.0 * (self.bx * x + self.by * y + self.bz * z)
            + self.c
        )

    def a_matrix(self) -> np.ndarray:
        return np.array(
            [
                [self.axx, self.axy, self.axz],
                [self.axy, self.ayy, self.ayz],
                [self.axz, self.ayz, self.azz],
            ]
        )

    def b_vector(self) -> np.ndarray:
        return np.array([self.bx, self.by, self.bz])

    def is_finite(self) -> bool:
        return all(
            np.isfinite(v)
            for v in (self.axx, self.axy, self.axz, self.ayy, self.ayz,
                      self.azz, self.bx, self.by, self.bz, self.c)
        )


ZERO_QUADRIC = Quadric()


def quadric_add(q1: Quadric, q2: Quadric) -> Quadric:
    """Component-wise sum of two quadrics."""
    return q1 + q2


def quadric_eval(q: Quadric, point) -> float:
    """Evaluate a quadric's error at a point."""
    return q.evaluate(point)


@dataclass(slots=True)
class CollapseRecord:
    """Reversible record of one vertex-pair collapse.

    ``edge_snaps`` and ``face_snaps`` hold the pre-collapse state of
    every simplex the collapse deleted or rewrote (plus edges whose
    kind was upgraded by a merge), keyed by stable ids.  Applying the
    record forward is a plain collapse; applying it backward (a vertex
    split) restores the previous complex exactly.
    """

    edge_id: int
    vertex_kept: int
    vertex_removed: int
    position_kept_before: tuple[float, float, float]
    position_removed_before: tuple[float, float, float]
    position_after: tuple[float, float, float]
    # (edge id, (a, b), kind) -- all were alive before the collapse
    edge_snaps: list[tuple[int, tuple[int, int], int]] = field(default_factory=list)
    # (face id, (a, b, c))
    face_snaps: list[tuple[int, tuple[int, int, int]]] = field(default_factory=list)


def _edge_key(i: int, j: int) -> tuple[int, int]:
    return (i, j) if i < j else (j, i)


def _face_key(a: int, b: int, c: int) -> tuple[int, int, int]:
    if a > b:
        a, b = b, a
    if b > c:
        b, c = c, b
        if a > b:
            a, b = b, a
    return (a, b, c)


class SimplicialComplex2:
    """Mutable simplicial 2-complex with star indices.

    Vertices, edges and faces live in append-only stores with alive
    flags; decimation never reuses ids.  ``edge_map`` and ``face_map``
    key the live elements by unordered vertex tuple, enforcing
    uniqueness.  Faces keep their corner order; the map key is sorted.
    """

    def __init__(self) -> None:
        self.positions = np.zeros((0, 3))
        self.vertex_alive: list[bool] = []
        self.vertex_source: list[int] = []
        self.edges: list[tuple[int, int]] = []
        self.edge_kind: list[int] = []
        self.edge_alive: list[bool] = []
        self.faces: list[tuple[int, int, int]] = []
        self.face_alive: list[bool] = []
        self.face_source: list[int] = []
        # Cached edge ids of each face's sides (ab, bc, ca); stale while
        # a face is offline, rewritten on registration.
        self.face_side_edges: list[tuple[int, int, int]] = []
        self.star_vertex_edges: list[set[int]] = []
        self.star_vertex_faces: list[set[int]] = []
        self.star_edge_faces: list[set[int]] = []
        self.edge_map: dict[tuple[int, int], int] = {}
        self.face_map: dict[tuple[int, int, int], int] = {}
        self.n_live_vertices = 0
        self.n_live_edges = 0
        self.n_live_faces = 0
        # Load-time drop counters, filled by the builder.
        self.n_degenerate_faces = 0
        self.n_duplicate_faces = 0

    # ---------------------------------------------------------------- build

    @classmethod
    def with_positions(cls, positions, sources=None) -> "SimplicialComplex2":
        sc = cls()
        pos = np.asarray(positions, dtype=np.float64).reshape(-1, 3)
        sc.positions = pos.copy()
        n = len(pos)
        sc.vertex_alive = [True] * n
        sc.vertex_source = list(sources) if sources is not None else list(range(n))
        sc.star_vertex_edges = [set() for _ in range(n)]
        sc.star_vertex_faces = [set() for _ in range(n)]
        sc.n_live_vertices = n
        return sc

    def add_edge(self, i: int, j: int, kind: int = PHYSICAL) -> int:
        if i == j:
            raise ValueError(f"degenerate edge ({i}, {j})")
        key = _edge_key(i, j)
        if key in self.edge_map:
            raise ValueError(f"duplicate edge {key}")
        eid = len(self.edges)
        self.edges.append(key)
        self.edge_kind.append(kind)
        self.edge_alive.append(True)
        self.star_edge_faces.append(set())
        self.edge_map[key] = eid
        self.star_vertex_edges[key[0]].add(eid)
        self.star_vertex_edges[key[1]].add(eid)
        self.n_live_edges += 1
        return eid

    def add_face(self, a: int, b: int, c: int, source: int = -1) -> int:
        """Add a triangle, creating any missing physical side edges."""
        if a == b or b == c or a == c:
            raise ValueError(f"degenerate face ({a}, {b}, {c})")
        key = _face_key(a, b, c)
        if key in self.face_map:
            raise ValueError(f"duplicate face {key}")
        fid = len(self.faces)
        self.faces.append((a, b, c))
        self.face_alive.append(True)
        self.face_source.append(source)
        self.face_map[key] = fid
        sides = []
        for u, v in ((a, b), (b, c), (c, a)):
            ek = _edge_key(u, v)
            eid = self.edge_map.get(ek)
            if eid is None:
                eid = self.add_edge(u, v, PHYSICAL)
            self.star_edge_faces[eid].add(fid)
            sides.append(eid)
        self.face_side_edges.append((sides[0], sides[1], sides[2]))
        for v in (a, b, c):
            self.star_vertex_faces[v].add(fid)
        self.n_live_faces += 1
        return fid

    # -------------------------------------------------------------- queries

    def edge_id(self, i: int, j: int) -> int | None:
        return self.edge_map.get(_edge_key(i, j))

    def live_vertices(self):
        return (i for i, a in enumerate(self.vertex_alive) if a)

    def live_edges(self):
        return (i for i, a in enumerate(self.edge_alive) if a)

    def live_faces(self):
        return (i for i, a in enumerate(self.face_alive) if a)

    def face_points(self, fid: int) -> np.ndarray:
        a, b, c = self.faces[fid]
        return self.positions[[a, b, c]]

    def bbox_diagonal(self) -> float:
        idx = [i for i, a in enumerate(self.vertex_alive) if a]
        if not idx:
            return 0.0
        pos = self.positions[idx]
        return float(np.linalg.norm(pos.max(axis=0) - pos.min(axis=0)))

    # --------------------------------------------- index (un)registration
    #
    # Collapse and split surgery takes affected simplices "offline"
    # (removing them from maps and stars while the element stores keep
    # their slots), rewrites their tuples, and registers them again.
    # Faces must go offline before their side edges, and edges come
    # back online before faces.

    def _unregister_face(self, fid: int) -> None:
        a, b, c = self.faces[fid]
        del self.face_map[_face_key(a, b, c)]
        for v in (a, b, c):
            self.star_vertex_faces[v].discard(fid)
        for u, v in ((a, b), (b, c), (c, a)):
            eid = self.edge_map.get(_edge_key(u, v))
            if eid is not None:
                self.star_edge_faces[eid].discard(fid)

    def _register_face(self, fid: int) -> None:
        a, b, c = self.faces[fid]
        self.face_map[_face_key(a, b, c)] = fid
        for v in (a, b, c):
            self.star_vertex_faces[v].add(fid)
        sides = []
        for u, v in ((a, b), (b, c), (c, a)):
            eid = self.edge_map[_edge_key(u, v)]
            self.star_edge_faces[eid].add(fid)
            sides.append(eid)
        self.face_side_edges[fid] = (sides[0], sides[1], sides[2])

    def _unregister_edge(self, eid: int) -> None:
        i, j = self.edges[eid]
        del self.edge_map[(i, j)]
        self.star_vertex_edges[i].discard(eid)
        self.star_vertex_edges[j].discard(eid)

    def _register_edge(self, eid: int) -> None:
        i, j = self.edges[eid]
        self.edge_map[(i, j)] = eid
        self.star_vertex_edges[i].add(eid)
        self.star_vertex_edges[j].add(eid)

    # ----------------------------------------------------------- validation

    def rebuild_stars(self):
        """Recompute all three star indices from the live simplices."""
        nv = len(self.vertex_alive)
        sve = [set() for _ in range(nv)]
        svf = [set() for _ in range(nv)]
        sef = [set() for _ in range(len(self.edges))]
        for eid, (i, j) in enumerate(self.edges):
            if self.edge_alive[eid]:
                sve[i].add(eid)
                sve[j].add(eid)
        for fid, (a, b, c) in enumerate(self.faces):
            if self.face_alive[fid]:
                for v in (a, b, c):
                    svf[v].add(fid)
                for u, v in ((a, b), (b, c), (c, a)):
                    eid = self.edge_map.get(_edge_key(u, v))
                    if eid is not None:
                        sef[eid].add(fid)
        return sve, svf, sef

    def validate(self) -> None:
        """Check every structural invariant; raises ValueError on failure."""
        seen_edges: dict[tuple[int, int], int] = {}
        for eid, (i, j) in enumerate(self.edges):
            if not self.edge_alive[eid]:
                continue
            if i == j:
                raise ValueError(f"edge {eid} has identical endpoints")
            if not (self.vertex_alive[i] and self.vertex_alive[j]):
                raise ValueError(f"edge {eid} references a dead vertex")
            key = _edge_key(i, j)
            if key in seen_edges:
                raise ValueError(f"edges {seen_edges[key]} and {eid} duplicate {key}")
            seen_edges[key] = eid
            if self.edge_map.get(key) != eid:
                raise ValueError(f"edge_map inconsistent for edge {eid}")
        if len(seen_edges) != self.n_live_edges or len(self.edge_map) != self.n_live_edges:
            raise ValueError("live edge count mismatch")

        seen_faces: dict[tuple[int, int, int], int] = {}
        for fid, (a, b, c) in enumerate(self.faces):
            if not self.face_alive[fid]:
                continue
            if a == b or b == c or a == c:
                raise ValueError(f"face {fid} has a repeated vertex")
            key = _face_key(a, b, c)
            if key in seen_faces:
                raise ValueError(f"faces {seen_faces[key]} and {fid} duplicate {key}")
            seen_faces[key] = fid
            if self.face_map.get(key) != fid:
                raise ValueError(f"face_map inconsistent for face {fid}")
            for slot, (u, v) in enumerate(((a, b), (b, c), (c, a))):
                eid = self.edge_map.get(_edge_key(u, v))
                if eid is None or not self.edge_alive[eid]:
                    raise ValueError(f"face {fid} side ({u},{v}) has no live edge")
                if self.edge_kind[eid] != PHYSICAL:
                    raise ValueError(f"face {fid} side ({u},{v}) is not physical")
                if self.face_side_edges[fid][slot] != eid:
                    raise ValueError(f"face {fid} cached side edges out of date")
        if len(seen_faces) != self.n_live_faces or len(self.face_map) != self.n_live_faces:
            raise ValueError("live face count mismatch")

        nlv = sum(self.vertex_alive)
        if nlv != self.n_live_vertices:
            raise ValueError("live vertex count mismatch")

        sve, svf, sef = self.rebuild_stars()
        if sve != self.star_vertex_edges:
            raise ValueError("star_vertex_edges out of sync")
        if svf != self.star_vertex_faces:
            raise ValueError("star_vertex_faces out of sync")
        if sef != self.star_edge_faces:
            raise ValueError("star_edge_faces out of sync")

    # -------------------------------------------------------------- copying

    def copy(self) -> "SimplicialComplex2":
        sc = SimplicialComplex2()
        sc.positions = self.positions.copy()
        sc.vertex_alive = list(self.vertex_alive)
        sc.vertex_source = list(self.vertex_source)
        sc.edges = list(self.edges)
        sc.edge_kind = list(self.edge_kind)
        sc.edge_alive = list(self.edge_alive)
        sc.faces = list(self.faces)
        sc.face_alive = list(self.face_alive)
        sc.face_source = list(self.face_source)
        sc.face_side_edges = list(self.face_side_edges)
        sc.star_vertex_edges = [set(s) for s in self.star_vertex_edges]
        sc.star_vertex_faces = [set(s) for s in self.star_vertex_faces]
        sc.star_edge_faces = [set(s) for s in self.star_edge_faces]
        sc.edge_map = dict(self.edge_map)
        sc.face_map = dict(self.face_map)
        sc.n_live_vertices = self.n_live_vertices
        sc.n_live_edges = self.n_live_edges
        sc.n_live_faces = self.n_live_faces
        sc.n_degenerate_faces = self.n_degenerate_faces
        sc.n_duplicate_faces = self.n_duplicate_faces
        return sc

    def compacted(self):
        """Renumber live elements densely.

        Returns ``(complex, vertex_old_ids, edge_old_ids, face_old_ids)``
        where the id arrays map each new index to its old id.
        """
        v_old = [i for i, a in enumerate(self.vertex_alive) if a]
        vmap = {old: new for new, old in enumerate(v_old)}
        sc = SimplicialComplex2.with_positions(
            self.positions[v_old] if v_old else np.zeros((0, 3)),
            sources=[self.vertex_source[i] for i in v_old],
        )
        e_old = []
        for eid in self.live_edges():
            i, j = self.edges[eid]
            sc.add_edge(vmap[i], vmap[j], self.edge_kind[eid])
            e_old.append(eid)
        f_old = []
        for fid in self.live_faces():
            a, b, c = self.faces[fid]
            sc.add_face(vmap[a], vmap[b], vmap[c], source=self.face_source[fid])
            f_old.append(fid)
        return sc, np.array(v_old, dtype=np.int64), np.array(e_old, dtype=np.int64), np.array(f_old, dtype=np.int64)
