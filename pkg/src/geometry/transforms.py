"""Rigid-body transform algebra and rotation constructions.

Euler convention used project-wide: rotation = Rz(yaw) @ Ry(pitch) @ Rx(roll),
right-handed frame with x forward, y left and z up.
"""

import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.constants import GIMBAL_LOCK_MARGIN, UNIT_AXIS_TOLERANCE
from src.errors import DegenerateDecompositionError, InvalidArgumentError
from src.geometry.types import EulerPose, PointCloud, RigidTransform


def _skew(vector: NDArray) -> NDArray:
    x, y, z = vector
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rodrigues(axis: ArrayLike, angle: float) -> RigidTransform:
    """Rotation by ``angle`` radians about the unit vector ``axis``."""
    unit = np.asarray(axis, dtype=np.float64)
    if unit.shape != (3,) or not np.isfinite(unit).all() or not math.isfinite(angle):
        raise InvalidArgumentError("rotation axis and angle must be finite")
    if abs(np.linalg.norm(unit) - 1.0) > UNIT_AXIS_TOLERANCE:
        raise InvalidArgumentError(
            f"rotation axis must be unit length, got |axis|={np.linalg.norm(unit):.12f}"
        )
    k = _skew(unit)
    rotation = np.eye(3) + math.sin(angle) * k + (1.0 - math.cos(angle)) * (k @ k)
    return RigidTransform(rotation, np.zeros(3))


def rotation_from_vector(rotation_vector: ArrayLike) -> RigidTransform:
    """Axis-angle vector (axis scaled by angle) to a rotation-only transform."""
    vector = np.asarray(rotation_vector, dtype=np.float64)
    angle = float(np.linalg.norm(vector))
    if angle == 0.0:
        return RigidTransform.identity()
    return rodrigues(vector / angle, angle)


def rotation_x(angle: float) -> NDArray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[1.0, 0.0, 0.0], [0.0, c, -s], [0.0, s, c]])


def rotation_y(angle: float) -> NDArray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, 0.0, s], [0.0, 1.0, 0.0], [-s, 0.0, c]])


def rotation_z(angle: float) -> NDArray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def euler_to_transform(pose: EulerPose) -> RigidTransform:
    if not all(math.isfinite(value) for value in pose):
        raise InvalidArgumentError(f"non-finite pose {pose}")
    rotation = rotation_z(pose.yaw) @ rotation_y(pose.pitch) @ rotation_x(pose.roll)
    return RigidTransform(rotation, np.array([pose.x, pose.y, pose.z]))


def transform_to_euler(transform: RigidTransform) -> EulerPose:
    r = transform.rotation
    cos_pitch = math.hypot(r[0, 0], r[1, 0])
    if cos_pitch < math.sin(GIMBAL_LOCK_MARGIN):
        raise DegenerateDecompositionError(
            "pitch is within gimbal-lock distance of ±π/2; yaw and roll are coupled"
        )
    pitch = math.atan2(-r[2, 0], cos_pitch)
    roll = math.atan2(r[2, 1], r[2, 2])
    yaw = math.atan2(r[1, 0], r[0, 0])
    x, y, z = (float(value) for value in transform.translation)
    return EulerPose(pitch, roll, yaw, x, y, z)


def try_transform_to_euler(transform: RigidTransform) -> EulerPose | None:
    """Like transform_to_euler, but ``None`` near gimbal lock."""
    try:
        return transform_to_euler(transform)
    except DegenerateDecompositionError:
        return None


def translation(vector: ArrayLike) -> RigidTransform:
    return RigidTransform(np.eye(3), np.asarray(vector, dtype=np.float64))


def compose(first: RigidTransform, second: RigidTransform) -> RigidTransform:
    """Return ``first ∘ second``: ``second`` is applied to points first."""
    return first.compose(second)


def invert(transform: RigidTransform) -> RigidTransform:
    return transform.inverse()


def apply(transform: RigidTransform, cloud: PointCloud) -> PointCloud:
    """Map every point of ``cloud`` through ``transform``; frame id is kept."""
    return PointCloud(transform.transform_points(cloud.points), cloud.frame_id)
