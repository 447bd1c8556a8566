"""Camera-frame processing: backprojection, filtering, downsampling.

Turns a depth image plus per-pixel semantic labels into a filtered,
labeled point cloud. Points live in the camera optical frame (x right,
y down, z forward) until explicitly transformed.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import DomainError, EmptyInput, InsufficientPoints, ShapeError
from .geometry import FRAME_SENSOR, FloatArray, RigidTransform, as_points
from .kdtree import KdTree


class SemanticClass(IntEnum):
    """Closed label set; `unlabeled` marks pixels with no class."""

    grass = 0
    rock = 1
    trail = 2
    root = 3
    structure = 4
    tree_trunk = 5
    vegetation = 6
    rough_trail = 7
    unlabeled = 8


N_REAL_CLASSES = 8  # everything except `unlabeled`


@dataclass(frozen=True)
class CameraIntrinsics:
    fx: float
    fy: float
    cx: float
    cy: float
    width: int
    height: int

    def __post_init__(self):
        if self.fx <= 0 or self.fy <= 0:
            raise DomainError("focal lengths must be positive")
        if not (0 <= self.cx < self.width) or not (0 <= self.cy < self.height):
            raise DomainError("principal point must lie inside the image")


@dataclass(frozen=True)
class SensorFrame:
    """One synthetic camera observation: depth + labels + sensor pose."""

    depth: np.ndarray
    labels: np.ndarray
    pose: RigidTransform
    timestamp: float = 0.0

    def __post_init__(self):
        depth = np.asarray(self.depth, dtype=np.float64)
        labels = np.asarray(self.labels, dtype=np.uint8)
        if depth.ndim != 2 or labels.shape != depth.shape:
            raise ShapeError(f"depth {depth.shape} and labels {labels.shape} must be equal 2D shapes")
        object.__setattr__(self, "depth", depth)
        object.__setattr__(self, "labels", labels)


@dataclass(frozen=True)
class LabeledPointCloud:
    """Points plus one SemanticClass ordinal per point."""

    xyz: FloatArray
    labels: np.ndarray
    frame: str = FRAME_SENSOR

    def __post_init__(self):
        xyz = as_points(self.xyz, allow_empty=True)
        labels = np.asarray(self.labels, dtype=np.uint8)
        if labels.shape != (xyz.shape[0],):
            raise ShapeError("labels must be one ordinal per point")
        object.__setattr__(self, "xyz", xyz)
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return self.xyz.shape[0]

    def transformed(self, transform: RigidTransform, frame: str) -> "LabeledPointCloud":
        return LabeledPointCloud(transform.apply(self.xyz), self.labels.copy(), frame=frame)


def backproject(frame: SensorFrame, intrinsics: CameraIntrinsics) -> LabeledPointCloud:
    """Pinhole backprojection of every pixel with a finite positive depth.

    X = (u - cx) * Z / fx, Y = (v - cy) * Z / fy; pixels whose depth is
    0 or NaN are treated as no-return and skipped. Output order is
    row-major over the image.
    """
    depth = frame.depth
    if depth.shape != (intrinsics.height, intrinsics.width):
        raise ShapeError(
            f"frame is {depth.shape}, intrinsics expect "
            f"{(intrinsics.height, intrinsics.width)}"
        )
    valid = np.isfinite(depth) & (depth > 0.0)
    v_idx, u_idx = np.nonzero(valid)
    z = depth[v_idx, u_idx]
    x = (u_idx - intrinsics.cx) * z / intrinsics.fx
    y = (v_idx - intrinsics.cy) * z / intrinsics.fy
    xyz = np.stack([x, y, z], axis=1)
    labels = frame.labels[v_idx, u_idx]
    return LabeledPointCloud(xyz, labels, frame=FRAME_SENSOR)


def range_height_filter(
    cloud: LabeledPointCloud,
    robot_pose: RigidTransform,
    min_range: float = 0.5,
    max_range: float = 6.0,
    max_height: float = 0.8,
) -> LabeledPointCloud:
    """Drop points outside [min_range, max_range] from the sensor, and
    points higher than the agent.

    `robot_pose` is the sensor-to-map transform; its translation z is the
    agent's reference height, so the cut is at map-frame
    ``z <= robot_pose.translation[2] + max_height``. The cloud itself must
    be in the sensor frame (ranges are measured from its origin).
    """
    if min_range >= max_range:
        raise DomainError("min_range must be < max_range")
    ranges = np.linalg.norm(cloud.xyz, axis=1)
    z_map = robot_pose.apply(cloud.xyz)[:, 2]
    keep = (ranges >= min_range) & (ranges <= max_range) & (z_map <= robot_pose.translation[2] + max_height)
    return LabeledPointCloud(cloud.xyz[keep], cloud.labels[keep], frame=cloud.frame)


def voxel_downsample(cloud: LabeledPointCloud, s: float) -> LabeledPointCloud:
    """Replace all points in each s-sized cube by their centroid.

    The grid is anchored at the origin (voxel index = floor(coord / s)).
    The output label per voxel is the majority class of its members,
    ties resolved toward the lowest class ordinal. Output voxels are
    ordered lexicographically by voxel index, which is deterministic for
    a given input.
    """
    if s <= 0:
        raise DomainError("voxel size must be positive")
    if len(cloud) == 0:
        return cloud
    cells = np.floor(cloud.xyz / s).astype(np.int64)
    uniq, inverse = np.unique(cells, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    n_vox = uniq.shape[0]

    sums = np.zeros((n_vox, 3))
    np.add.at(sums, inverse, cloud.xyz)
    counts = np.bincount(inverse, minlength=n_vox).astype(np.float64)
    centroids = sums / counts[:, None]

    n_classes = int(cloud.labels.max()) + 1 if len(cloud) else 1
    votes = np.zeros((n_vox, n_classes), dtype=np.int64)
    np.add.at(votes, (inverse, cloud.labels.astype(np.int64)), 1)
    majority = votes.argmax(axis=1).astype(np.uint8)  # argmax picks lowest ordinal on ties

    return LabeledPointCloud(centroids, majority, frame=cloud.frame)


def statistical_outlier_removal(cloud: LabeledPointCloud, k: int = 10, alpha: float = 2.0) -> LabeledPointCloud:
    """Keep points whose mean k-NN distance is within alpha standard
    deviations of the global mean.

    The neighbor set excludes the point itself. With sigma = 0 (perfectly
    regular clouds) the acceptance interval degenerates to the single
    value mu, and the inclusive comparisons keep every point.
    """
    if k < 1:
        raise DomainError("k must be >= 1")
    if alpha <= 0:
        raise DomainError("alpha must be positive")
    n = len(cloud)
    if n <= k:
        raise InsufficientPoints(f"need more than k={k} points, got {n}")

    tree = KdTree(cloud.xyz)
    mean_d = np.empty(n)
    for i in range(n):
        idx, dist = tree.knearest(cloud.xyz[i], k + 1)
        acc = 0.0
        taken = 0
        for j, d in zip(idx, dist):
            if j == i:
                continue
            acc += d
            taken += 1
            if taken == k:
                break
        mean_d[i] = acc / k
    mu = float(mean_d.mean())
    sigma = float(mean_d.std())
    keep = (mean_d >= mu - alpha * sigma) & (mean_d <= mu + alpha * sigma)
    return LabeledPointCloud(cloud.xyz[keep], cloud.labels[keep], frame=cloud.frame)
