"""Fine calibration: point-to-plane ICP and the octree volume scan."""

from src.refinement.icpn import icpn_refine, point_to_plane_system
from src.refinement.octree import (
    leaf_keys,
    octree_descent,
    octree_grid,
    octree_refine,
    octree_volume,
)
from src.refinement.types import (
    IcpnConfig,
    IcpnResult,
    OctreeDescent,
    OctreeGrid,
    OctreeScanConfig,
    OctreeVolume,
    PointToPlaneSystem,
)


__all__ = [
    "IcpnConfig",
    "IcpnResult",
    "OctreeDescent",
    "OctreeGrid",
    "OctreeScanConfig",
    "OctreeVolume",
    "PointToPlaneSystem",
    "icpn_refine",
    "leaf_keys",
    "octree_descent",
    "octree_grid",
    "octree_refine",
    "octree_volume",
]
