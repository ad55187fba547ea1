"""Axis-aligned bounding-box tree over triangles.

Supports exact closest-point queries and a dual-tree range traversal
that yields candidate face pairs within a distance threshold.  Nodes
optionally carry a connected-component label (set when the subtree is
uniform) so pair queries can prune same-component subtrees.
"""

from __future__ import annotations

import numpy as np

from .geom import _closest_point_tri


class Bvh:
    """Median-split AABB tree.

    Parameters
    ----------
    tri_points : (F, 3, 3) float array
        Corner positions per triangle.
    face_ids : (F,) int array, optional
        External ids reported by queries; defaults to 0..F-1.
    labels : (F,) int array, optional
        Per-triangle component labels for pair-query pruning.
    leaf_size : int
        Max triangles per leaf.
    """

    def __init__(self, tri_points, face_ids=None, labels=None, leaf_size: int = 8):
        tri = np.asarray(tri_points, dtype=np.float64)
        if tri.ndim != 3 or tri.shape[1:] != (3, 3):
            raise ValueError("tri_points must have shape (F, 3, 3)")
        self.tri = tri
        n = len(tri)
        self.face_ids = (
            np.arange(n, dtype=np.int64) if face_ids is None
            else np.asarray(face_ids, dtype=np.int64)
        )
        self.labels = None if labels is None else np.asarray(labels, dtype=np.int64)
        self.leaf_size = max(1, int(leaf_size))
        if n == 0:
            raise ValueError("empty triangle set")

        tri_min = tri.min(axis=1)
        tri_max = tri.max(axis=1)
        centroids = tri.mean(axis=1)
        self.order = np.arange(n, dtype=np.int64)

        node_min, node_max = [], []
        node_left, node_right = [], []
        node_start, node_count = [], []
        node_label = []

        # Iterative build; stack entries are (lo, hi, slot). A slot of -1
        # means the node index is appended fresh; children patch parents.
        stack = [(0, n, -1, 0)]
        while stack:
            lo, hi, parent, side = stack.pop()
            idx = self.order[lo:hi]
            bmin = tri_min[idx].min(axis=0)
            bmax = tri_max[idx].max(axis=0)
            me = len(node_min)
            node_min.append(bmin)
            node_max.append(bmax)
            node_left.append(-1)
            node_right.append(-1)
            node_start.append(lo)
            node_count.append(0)
            if self.labels is not None:
                lab = self.labels[idx]
                node_label.append(int(lab[0]) if (lab == lab[0]).all() else -1)
            else:
                node_label.append(-1)
            if parent >= 0:
                if side == 0:
                    node_left[parent] = me
                else:
                    node_right[parent] = me
            if hi - lo <= self.leaf_size:
                node_count[me] = hi - lo
                continue
            cen = centroids[idx]
            axis = int(np.argmax(cen.max(axis=0) - cen.min(axis=0)))
            mid = (hi - lo) // 2
            part = np.argpartition(cen[:, axis], mid, kind="introselect")
            self.order[lo:hi] = idx[part]
            stack.append((lo + mid, hi, me, 1))
            stack.append((lo, lo + mid, me, 0))

        self.node_min = np.asarray(node_min)
        self.node_max = np.asarray(node_max)
        self.node_left = np.asarray(node_left, dtype=np.int64)
        self.node_right = np.asarray(node_right, dtype=np.int64)
        self.node_start = np.asarray(node_start, dtype=np.int64)
        self.node_count = np.asarray(node_count, dtype=np.int64)
        self.node_label = np.asarray(node_label, dtype=np.int64)
        # Flat python copies; scalar traversal avoids numpy indexing cost.
        self._nmin = self.node_min.tolist()
        self._nmax = self.node_max.tolist()
        self._tri_flat = tri.reshape(n, 9).tolist()
        self._order_list = self.order.tolist()
        self._left = self.node_left.tolist()
        self._right = self.node_right.tolist()
        self._start = self.node_start.tolist()
        self._count = self.node_count.tolist()
        self._label = self.node_label.tolist()
        self._tmin = tri_min.tolist()
        self._tmax = tri_max.tolist()

    def _box_dist2(self, node, px, py, pz):
        mn = self._nmin[node]
        mx = self._nmax[node]
        d = 0.0
        v = px
        if v < mn[0]:
            d += (mn[0] - v) ** 2
        elif v > mx[0]:
            d += (v - mx[0]) ** 2
        v = py
        if v < mn[1]:
            d += (mn[1] - v) ** 2
        elif v > mx[1]:
            d += (v - mx[1]) ** 2
        v = pz
        if v < mn[2]:
            d += (mn[2] - v) ** 2
        elif v > mx[2]:
            d += (v - mx[2]) ** 2
        return d

    def closest_point(self, p):
        """Exact closest point on the triangle set.

        Returns (dist2, point, face_id, bary).
        """
        px, py, pz = float(p[0]), float(p[1]), float(p[2])
        best_d2 = np.inf
        best = None
        stack = [0]
        left = self._left
        right = self._right
        while stack:
            node = stack.pop()
            if self._box_dist2(node, px, py, pz) >= best_d2:
                continue
            l = left[node]
            if l < 0:
                start = self._start[node]
                for k in range(start, start + self._count[node]):
                    f = self._order_list[k]
                    t = self._tri_flat[f]
                    qx, qy, qz, u, v, w = _closest_point_tri(
                        px, py, pz, t[0], t[1], t[2], t[3], t[4], t[5], t[6], t[7], t[8]
                    )
                    dx, dy, dz = px - qx, py - qy, pz - qz
                    d2 = dx * dx + dy * dy + dz * dz
                    if d2 < best_d2:
                        best_d2 = d2
                        best = (qx, qy, qz, f, u, v, w)
                continue
            r = right[node]
            dl = self._box_dist2(l, px, py, pz)
            dr = self._box_dist2(r, px, py, pz)
            # Nearer child explored first (pushed last).
            if dl <= dr:
                if dr < best_d2:
                    stack.append(r)
                if dl < best_d2:
                    stack.append(l)
            else:
                if dl < best_d2:
                    stack.append(l)
                if dr < best_d2:
                    stack.append(r)
        qx, qy, qz, f, u, v, w = best
        return (
            best_d2,
            np.array([qx, qy, qz]),
            int(self.face_ids[f]),
            np.array([u, v, w]),
        )

    def _box_pair_dist2(self, a, b):
        amin, amax = self._nmin[a], self._nmax[a]
        bmin, bmax = self._nmin[b], self._nmax[b]
        d = 0.0
        for k in range(3):
            lo = bmin[k] - amax[k]
            if lo > 0.0:
                d += lo * lo
            else:
                hi = amin[k] - bmax[k]
                if hi > 0.0:
                    d += hi * hi
        return d

    def _leaf_faces(self, node):
        start = self._start[node]
        return self._order_list[start:start + self._count[node]]

    def cross_component_pairs(self, eps: float):
        """Candidate face-index pairs within eps with differing labels.

        Dual self-traversal.  Subtree pairs whose boxes are farther than
        eps apart, or whose component labels are uniform and equal, are
        pruned.  Pairs are pre-filtered by per-triangle AABB distance;
        callers apply the exact triangle test.  Requires labels.
        """
        if self.labels is None:
            raise ValueError("labels required for pair queries")
        eps2 = float(eps) * float(eps)
        labels = self.labels
        tmin = self._tmin
        tmax = self._tmax
        out = []
        stack = [(0, 0)]
        left = self._left
        right = self._right
        label = self._label
        while stack:
            a, b = stack.pop()
            la = label[a]
            if la != -1 and la == label[b]:
                continue
            if a != b and self._box_pair_dist2(a, b) > eps2:
                continue
            al = left[a]
            bl = left[b]
            if a == b:
                if al < 0:
                    faces = self._leaf_faces(a)
                    m = len(faces)
                    for i in range(m):
                        fi = faces[i]
                        li = labels[fi]
                        for j in range(i + 1, m):
                            fj = faces[j]
                            if labels[fj] == li:
                                continue
                            if _aabb_dist2(tmin[fi], tmax[fi], tmin[fj], tmax[fj]) <= eps2:
                                out.append((fi, fj) if fi < fj else (fj, fi))
                else:
                    ar = right[a]
                    stack.append((al, al))
                    stack.append((ar, ar))
                    stack.append((al, ar))
                continue
            # Distinct nodes: leaves pair up, otherwise split the wider node.
            if al < 0 and bl < 0:
                fa = self._leaf_faces(a)
                fb = self._leaf_faces(b)
                for fi in fa:
                    li = labels[fi]
                    for fj in fb:
                        if labels[fj] == li:
                            continue
                        if _aabb_dist2(tmin[fi], tmax[fi], tmin[fj], tmax[fj]) <= eps2:
                            out.append((fi, fj) if fi < fj else (fj, fi))
            elif al < 0:
                stack.append((a, bl))
                stack.append((a, right[b]))
            elif bl < 0:
                stack.append((al, b))
                stack.append((right[a], b))
            elif _node_extent(self._nmin[a], self._nmax[a]) >= _node_extent(self._nmin[b], self._nmax[b]):
                stack.append((al, b))
                stack.append((right[a], b))
            else:
                stack.append((a, bl))
                stack.append((a, right[b]))
        return out


def _node_extent(mn, mx):
    return (mx[0] - mn[0]) + (mx[1] - mn[1]) + (mx[2] - mn[2])


def _aabb_dist2(amin, amax, bmin, bmax):
    d = 0.0
    for k in range(3):
        lo = bmin[k] - amax[k]
        if lo > 0.0:
            d += lo * lo
        else:
            hi = amin[k] - bmax[k]
            if hi > 0.0:
                d += hi * hi
    return d
