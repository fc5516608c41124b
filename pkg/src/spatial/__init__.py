"""Nearest-neighbour search, normal estimation and downsampling."""

from src.spatial.index import NeighborIndex, build_index
from src.spatial.normals import estimate_normals
from src.spatial.types import OrientedCloud, OrientedPoint
from src.spatial.voxel import voxel_downsample


__all__ = [
    "NeighborIndex",
    "OrientedCloud",
    "OrientedPoint",
    "build_index",
    "estimate_normals",
    "voxel_downsample",
]
