"""Voxel-grid downsampling."""

import numpy as np

from src.errors import InvalidArgumentError
from src.geometry import PointCloud


def voxel_downsample(cloud: PointCloud, voxel: float) -> PointCloud:
    """Centroid of each occupied voxel, voxels anchored at the frame origin.

    Output rows follow the sorted voxel keys, so the result is deterministic.
    """
    if voxel <= 0:
        raise InvalidArgumentError(f"voxel size must be positive, got {voxel}")
    if len(cloud) == 0:
        return cloud

    keys = np.floor(cloud.points / voxel).astype(np.int64)
    _, inverse, counts = np.unique(
        keys, axis=0, return_inverse=True, return_counts=True
    )
    inverse = inverse.reshape(-1)
    sums = np.zeros((len(counts), 3))
    np.add.at(sums, inverse, cloud.points)
    return PointCloud(sums / counts[:, None], cloud.frame_id)
