"""Value types for points, clouds and rigid poses."""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.constants import ORTHONORMAL_TOLERANCE
from src.errors import InvalidArgumentError


def _frozen_array(values: ArrayLike, shape: tuple[int, ...] | None = None) -> NDArray:
    array = np.array(values, dtype=np.float64)
    if shape is not None and array.shape != shape:
        raise InvalidArgumentError(f"expected shape {shape}, got {array.shape}")
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class PointCloud:
    """Ordered LiDAR samples in the frame of one sensor.

    Each row of ``points`` is a Point3 (x forward, y left, z up, meters).
    """

    points: NDArray
    frame_id: str = "cloud"

    def __post_init__(self) -> None:
        points = np.array(self.points, dtype=np.float64).reshape(-1, 3)
        if not np.isfinite(points).all():
            raise InvalidArgumentError(
                f"cloud '{self.frame_id}' contains non-finite coordinates"
            )
        points.setflags(write=False)
        object.__setattr__(self, "points", points)

    def __len__(self) -> int:
        return len(self.points)

    def with_points(self, points: ArrayLike) -> "PointCloud":
        return PointCloud(np.asarray(points), self.frame_id)

    def subset(self, ids: ArrayLike) -> "PointCloud":
        return PointCloud(self.points[np.asarray(ids)], self.frame_id)


@dataclass(frozen=True, eq=False)
class RigidTransform:
    """SE(3) pose: ``x -> rotation @ x + translation``."""

    rotation: NDArray = field(default_factory=lambda: np.eye(3))
    translation: NDArray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self) -> None:
        rotation = _frozen_array(self.rotation, (3, 3))
        translation = _frozen_array(self.translation, (3,))
        if not (np.isfinite(rotation).all() and np.isfinite(translation).all()):
            raise InvalidArgumentError("transform contains non-finite values")
        orthogonality = np.abs(rotation @ rotation.T - np.eye(3)).max()
        if orthogonality > ORTHONORMAL_TOLERANCE:
            raise InvalidArgumentError(
                f"rotation is not orthonormal (deviation {orthogonality:.2e})"
            )
        if abs(np.linalg.det(rotation) - 1.0) > ORTHONORMAL_TOLERANCE:
            raise InvalidArgumentError("rotation is a reflection (det != +1)")
        object.__setattr__(self, "rotation", rotation)
        object.__setattr__(self, "translation", translation)

    @classmethod
    def identity(cls) -> "RigidTransform":
        return cls()

    @classmethod
    def from_matrix(cls, matrix: ArrayLike) -> "RigidTransform":
        homogeneous = np.asarray(matrix, dtype=np.float64)
        return cls(homogeneous[:3, :3], homogeneous[:3, 3])

    def as_matrix(self) -> NDArray:
        homogeneous = np.eye(4)
        homogeneous[:3, :3] = self.rotation
        homogeneous[:3, 3] = self.translation
        return homogeneous

    def compose(self, other: "RigidTransform") -> "RigidTransform":
        """Return ``self ∘ other`` (apply ``other`` first)."""
        return RigidTransform(
            self.rotation @ other.rotation,
            self.rotation @ other.translation + self.translation,
        )

    def inverse(self) -> "RigidTransform":
        rotation_t = self.rotation.T
        return RigidTransform(rotation_t, -rotation_t @ self.translation)

    def transform_points(self, points: ArrayLike) -> NDArray:
        return np.asarray(points, dtype=np.float64) @ self.rotation.T + self.translation


class EulerPose(NamedTuple):
    """Per-axis pose view: angles in radians, translation in meters.

    Rotation is ``Rz(yaw) @ Ry(pitch) @ Rx(roll)``.
    """

    pitch: float = 0.0
    roll: float = 0.0
    yaw: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def to_degrees(self) -> "EulerPose":
        return EulerPose(
            math.degrees(self.pitch),
            math.degrees(self.roll),
            math.degrees(self.yaw),
            self.x,
            self.y,
            self.z,
        )

    @classmethod
    def from_degrees(
        cls,
        pitch: float = 0.0,
        roll: float = 0.0,
        yaw: float = 0.0,
        x: float = 0.0,
        y: float = 0.0,
        z: float = 0.0,
    ) -> "EulerPose":
        return cls(math.radians(pitch), math.radians(roll), math.radians(yaw), x, y, z)
