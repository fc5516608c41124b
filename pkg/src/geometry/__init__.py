"""Rigid-body geometry: clouds, poses and rotation constructions."""

from src.geometry.transforms import (
    apply,
    compose,
    euler_to_transform,
    invert,
    rodrigues,
    rotation_from_vector,
    rotation_x,
    rotation_y,
    rotation_z,
    transform_to_euler,
    translation,
    try_transform_to_euler,
)
from src.geometry.types import EulerPose, PointCloud, RigidTransform


__all__ = [
    "EulerPose",
    "PointCloud",
    "RigidTransform",
    "apply",
    "compose",
    "euler_to_transform",
    "invert",
    "rodrigues",
    "rotation_from_vector",
    "rotation_x",
    "rotation_y",
    "rotation_z",
    "transform_to_euler",
    "translation",
    "try_transform_to_euler",
]
