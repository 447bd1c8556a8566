"""Rigid transforms and point-cloud value types.

Conventions used throughout the library:

* points are float64 arrays of shape (N, 3), meters
* a :class:`RigidTransform` maps points from its source frame into its
  target frame as ``p' = R p + t``
* clouds carry a frame tag, either ``"sensor"`` or ``"map"``
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from numpy.typing import NDArray

from .errors import DomainError, EmptyInput, ShapeError

FloatArray = NDArray[np.float64]

FRAME_SENSOR = "sensor"
FRAME_MAP = "map"

_ORTHO_TOL = 1e-9


def as_points(points, *, allow_empty: bool = False) -> FloatArray:
    """Coerce input to a contiguous (N, 3) float64 array, rejecting non-finite values."""
    arr = np.ascontiguousarray(points, dtype=np.float64)
    if arr.ndim == 1 and arr.size == 3:
        arr = arr.reshape(1, 3)
    if arr.ndim != 2 or arr.shape[1] != 3:
        raise ShapeError(f"expected (N, 3) points, got shape {arr.shape}")
    if arr.shape[0] == 0 and not allow_empty:
        raise EmptyInput("point set is empty")
    if not np.all(np.isfinite(arr)):
        raise DomainError("points contain NaN or Inf")
    return arr


def as_vec3(v) -> FloatArray:
    arr = np.asarray(v, dtype=np.float64).reshape(3)
    if not np.all(np.isfinite(arr)):
        raise DomainError("vector contains NaN or Inf")
    return arr


@dataclass(frozen=True)
class RigidTransform:
    """SO(3) rotation plus translation; orthonormality enforced at construction."""

    rotation: FloatArray
    translation: FloatArray

    def __post_init__(self):
        rot = np.asarray(self.rotation, dtype=np.float64).reshape(3, 3)
        trans = as_vec3(self.translation)
        if not np.all(np.isfinite(rot)):
            raise DomainError("rotation contains NaN or Inf")
        if np.max(np.abs(rot.T @ rot - np.eye(3))) > _ORTHO_TOL:
            raise DomainError("rotation is not orthonormal within 1e-9")
        if abs(np.linalg.det(rot) - 1.0) > _ORTHO_TOL:
            raise DomainError("rotation determinant is not +1 within 1e-9")
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "translation", trans)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_rot_z(cls, angle: float, translation=(0.0, 0.0, 0.0)) -> "RigidTransform":
        """Rotation by `angle` radians about the +z axis, then translation."""
        c, s = np.cos(angle), np.sin(angle)
        rot = np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])
        return cls(rot, np.asarray(translation, dtype=np.float64))

    @classmethod
    def from_axis_angle(cls, axis, angle: float, translation=(0.0, 0.0, 0.0)) -> "RigidTransform":
        """Rodrigues rotation about an arbitrary axis."""
        ax = as_vec3(axis)
        norm = np.linalg.norm(ax)
        if norm == 0.0:
            raise DomainError("rotation axis must be non-zero")
        ax = ax / norm
        k = np.array(
            [
                [0.0, -ax[2], ax[1]],
                [ax[2], 0.0, -ax[0]],
                [-ax[1], ax[0], 0.0],
            ]
        )
        rot = np.eye(3) + np.sin(angle) * k + (1.0 - np.cos(angle)) * (k @ k)
        # Re-orthonormalize so the constructor's 1e-9 gate always passes.
        u, _, vt = np.linalg.svd(rot)
        rot = u @ vt
        return cls(rot, np.asarray(translation, dtype=np.float64))

    def apply(self, points) -> FloatArray:
        """Apply to a (3,) point or (N, 3) array; returns the same shape."""
        arr = np.asarray(points, dtype=np.float64)
        if arr.ndim == 1:
            return self.rotation @ arr + self.translation
        return arr @ self.rotation.T + self.translation

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Return self ∘ other: `other` is applied first, then `self`."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "RigidTransform":
        rot_t = self.rotation.T.copy()
        return RigidTransform(rot_t, -(rot_t @ self.translation))


@dataclass(frozen=True)
class PointCloud:
    """Immutable 3D point set with a frame tag fixed at construction."""

    xyz: FloatArray
    frame: str = FRAME_SENSOR

    def __post_init__(self):
        object.__setattr__(self, "xyz", as_points(self.xyz, allow_empty=True))
        if self.frame not in (FRAME_SENSOR, FRAME_MAP):
            raise DomainError(f"unknown frame tag {self.frame!r}")

    def __len__(self) -> int:
        return self.xyz.shape[0]


def transform_apply(transform: RigidTransform, cloud: PointCloud, frame: str = FRAME_MAP) -> PointCloud:
    """Map every point through `transform` and retag the cloud's frame."""
    return PointCloud(transform.apply(cloud.xyz), frame=frame)
