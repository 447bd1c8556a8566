"""Balanced k-d tree over 3D points.

Construction splits on the axis of largest extent at the median point, so
the tree is balanced regardless of input order. Queries are exact: the
nearest neighbor returned is identical to a brute-force linear scan, with
ties broken toward the lowest point index. Leaves hold small buckets that
are scanned with plain float arithmetic, which keeps single-query latency
low enough for the registration and planning hot loops.
"""

from __future__ import annotations

from bisect import insort

import numpy as np

from .errors import DomainError, EmptyInput
from .geometry import as_points

_LEAF_SIZE = 16
_INF = float("inf")


class KdTree:
    """Spatial index supporting exact nearest, k-nearest and radius queries."""

    def __init__(self, points):
        pts = as_points(points)
        if pts.shape[0] == 0:
            raise EmptyInput("cannot build a k-d tree over an empty cloud")
        self._points = pts
        self._build(pts)

    @property
    def size(self) -> int:
        return self._points.shape[0]

    @property
    def points(self) -> np.ndarray:
        return self._points

    def _build(self, pts: np.ndarray) -> None:
        axis_l: list[int] = []
        split_l: list[float] = []
        left_l: list[int] = []
        right_l: list[int] = []
        start_l: list[int] = []
        end_l: list[int] = []
        perm: list[int] = []

        def alloc() -> int:
            axis_l.append(-1)
            split_l.append(0.0)
            left_l.append(-1)
            right_l.append(-1)
            start_l.append(0)
            end_l.append(0)
            return len(axis_l) - 1

        root = alloc()
        work = [(np.arange(pts.shape[0]), root)]
        while work:
            idx, slot = work.pop()
            if idx.shape[0] <= _LEAF_SIZE:
                start_l[slot] = len(perm)
                perm.extend(int(i) for i in idx)
                end_l[slot] = len(perm)
                continue
            sub = pts[idx]
            extents = sub.max(axis=0) - sub.min(axis=0)
            axis = int(np.argmax(extents))
            order = np.argsort(sub[:, axis], kind="stable")
            mid = idx.shape[0] // 2
            axis_l[slot] = axis
            split_l[slot] = float(sub[order[mid], axis])
            lslot = alloc()
            rslot = alloc()
            left_l[slot] = lslot
            right_l[slot] = rslot
            work.append((idx[order[:mid]], lslot))
            work.append((idx[order[mid:]], rslot))

        self._axis = axis_l
        self._split = split_l
        self._left = left_l
        self._right = right_l
        self._start = start_l
        self._end = end_l
        self._orig = perm
        flat: list[float] = []
        for i in perm:
            p = pts[i]
            flat.append(float(p[0]))
            flat.append(float(p[1]))
            flat.append(float(p[2]))
        self._flat = flat

    def nearest(self, query) -> tuple[int, float]:
        """Index and Euclidean distance of the closest indexed point.

        Equidistant candidates resolve to the lowest original index.
        """
        q = np.asarray(query, dtype=np.float64).reshape(3)
        if not np.all(np.isfinite(q)):
            raise DomainError("query contains NaN or Inf")
        qx, qy, qz = float(q[0]), float(q[1]), float(q[2])
        qtup = (qx, qy, qz)
        flat = self._flat
        orig = self._orig
        axis_a, split_a = self._axis, self._split
        left_a, right_a = self._left, self._right
        start_a, end_a = self._start, self._end

        best_d2 = _INF
        best_i = -1
        stack = [(0, 0.0)]
        while stack:
            node, pd2 = stack.pop()
            if pd2 > best_d2:
                continue
            while axis_a[node] >= 0:
                axis = axis_a[node]
                diff = qtup[axis] - split_a[node]
                if diff <= 0.0:
                    far = right_a[node]
                    node = left_a[node]
                else:
                    far = left_a[node]
                    node = right_a[node]
                fd2 = diff * diff
                if fd2 <= best_d2:
                    stack.append((far, fd2))
            for j in range(start_a[node], end_a[node]):
                b = 3 * j
                dx = flat[b] - qx
                dy = flat[b + 1] - qy
                dz = flat[b + 2] - qz
                d2 = dx * dx + dy * dy + dz * dz
                if d2 < best_d2 or (d2 == best_d2 and orig[j] < best_i):
                    best_d2 = d2
                    best_i = orig[j]
        return best_i, best_d2 ** 0.5

    def nearest_many(self, queries) -> tuple[np.ndarray, np.ndarray]:
        """Vector form of :meth:`nearest` over an (M, 3) query array."""
        qs = as_points(queries, allow_empty=True)
        idx = np.empty(qs.shape[0], dtype=np.int64)
        dist = np.empty(qs.shape[0], dtype=np.float64)
        near = self.nearest
        for m in range(qs.shape[0]):
            i, d = near(qs[m])
            idx[m] = i
            dist[m] = d
        return idx, dist

    def knearest(self, query, k: int) -> tuple[list[int], list[float]]:
        """The k closest points ordered by (distance, index)."""
        if k < 1:
            raise DomainError("k must be >= 1")
        q = np.asarray(query, dtype=np.float64).reshape(3)
        qx, qy, qz = float(q[0]), float(q[1]), float(q[2])
        qtup = (qx, qy, qz)
        flat = self._flat
        orig = self._orig
        axis_a, split_a = self._axis, self._split
        left_a, right_a = self._left, self._right
        start_a, end_a = self._start, self._end

        best: list[tuple[float, int]] = []
        tau = _INF
        stack = [(0, 0.0)]
        while stack:
            node, pd2 = stack.pop()
            if pd2 > tau:
                continue
            while axis_a[node] >= 0:
                axis = axis_a[node]
                diff = qtup[axis] - split_a[node]
                if diff <= 0.0:
                    far = right_a[node]
                    node = left_a[node]
                else:
                    far = left_a[node]
                    node = right_a[node]
                fd2 = diff * diff
                if fd2 <= tau:
                    stack.append((far, fd2))
            for j in range(start_a[node], end_a[node]):
                b = 3 * j
                dx = flat[b] - qx
                dy = flat[b + 1] - qy
                dz = flat[b + 2] - qz
                d2 = dx * dx + dy * dy + dz * dz
                if len(best) < k:
                    insort(best, (d2, orig[j]))
                    if len(best) == k:
                        tau = best[-1][0]
                elif (d2, orig[j]) < best[-1]:
                    insort(best, (d2, orig[j]))
                    best.pop()
                    tau = best[-1][0]
        return [i for _, i in best], [d2 ** 0.5 for d2, _ in best]

    def radius(self, query, r: float) -> np.ndarray:
        """Ascending original indices of all points within distance r (inclusive)."""
        if r < 0:
            raise DomainError("radius must be >= 0")
        q = np.asarray(query, dtype=np.float64).reshape(3)
        qx, qy, qz = float(q[0]), float(q[1]), float(q[2])
        qtup = (qx, qy, qz)
        r2 = float(r) * float(r)
        flat = self._flat
        orig = self._orig
        axis_a, split_a = self._axis, self._split
        left_a, right_a = self._left, self._right
        start_a, end_a = self._start, self._end

        hits: list[int] = []
        stack = [(0, 0.0)]
        while stack:
            node, pd2 = stack.pop()
            if pd2 > r2:
                continue
            while axis_a[node] >= 0:
                axis = axis_a[node]
                diff = qtup[axis] - split_a[node]
                if diff <= 0.0:
                    far = right_a[node]
                    node = left_a[node]
                else:
                    far = left_a[node]
                    node = right_a[node]
                fd2 = diff * diff
                if fd2 <= r2:
                    stack.append((far, fd2))
            for j in range(start_a[node], end_a[node]):
                b = 3 * j
                dx = flat[b] - qx
                dy = flat[b + 1] - qy
                dz = flat[b + 2] - qz
                if dx * dx + dy * dy + dz * dz <= r2:
                    hits.append(orig[j])
        hits.sort()
        return np.asarray(hits, dtype=np.int64)


def kdtree_build(cloud) -> KdTree:
    """Build a tree from a PointCloud or raw (N, 3) array."""
    xyz = cloud.xyz if hasattr(cloud, "xyz") else cloud
    return KdTree(xyz)


def kdtree_nearest(tree: KdTree, query) -> tuple[int, float]:
    return tree.nearest(query)
