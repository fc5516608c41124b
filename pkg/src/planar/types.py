"""Configuration and result types for the yaw/x/y planar search."""

import math
from typing import NamedTuple

import numpy as np

from src.constants import FULL_CIRCLE, LOW_CONFIDENCE_RATIO, MIN_PLANAR_CORRESPONDENCES
from src.geometry import RigidTransform, rotation_z


class PlanarSearchConfig(NamedTuple):
    """Search grid for yaw (radians) and x/y (meters)."""

    yaw_range: float = FULL_CIRCLE
    coarse_step: float = math.radians(2.0)
    refine_levels: int = 6
    xy_range: float = 0.5
    xy_step: float = 0.05
    max_correspondence_dist: float = 1.0
    downsample_voxel: float = 0.3
    alternations: int = 2
    yaw_seeds: int = 3
    min_correspondences: int = MIN_PLANAR_CORRESPONDENCES
    low_confidence_ratio: float = LOW_CONFIDENCE_RATIO


class PlanarEstimate(NamedTuple):
    yaw: float
    x: float
    y: float
    cost: float
    correspondence_count: int
    low_confidence: bool = False
    evaluations: int = 0

    def as_transform(self) -> RigidTransform:
        """``Rz(yaw)`` followed by the in-plane shift (x, y, 0)."""
        return RigidTransform(rotation_z(self.yaw), np.array([self.x, self.y, 0.0]))
