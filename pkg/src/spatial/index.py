"""Exact k-nearest-neighbour search over a point cloud."""

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.spatial import cKDTree

from src.errors import InvalidArgumentError
from src.geometry import PointCloud


class NeighborIndex:
    """Immutable k-d tree over one cloud; safe to query from many threads."""

    def __init__(self, cloud: PointCloud) -> None:
        if len(cloud) == 0:
            raise InvalidArgumentError(f"cannot index empty cloud '{cloud.frame_id}'")
        self.cloud = cloud
        self._tree = cKDTree(cloud.points)

    def __len__(self) -> int:
        return len(self.cloud)

    def query(
        self,
        points: ArrayLike,
        k: int = 1,
        distance_upper_bound: float = np.inf,
    ) -> tuple[NDArray, NDArray]:
        """Distances and ids of the ``k`` nearest cloud points, nearest first.

        ``k`` saturates at the cloud size. For ``k == 1`` both arrays are 1-D.
        Neighbours beyond ``distance_upper_bound`` come back as distance
        ``inf`` and id ``len(self)``.
        """
        if k < 1:
            raise InvalidArgumentError(f"k must be >= 1, got {k}")
        queries = np.asarray(points, dtype=np.float64).reshape(-1, 3)
        k = min(k, len(self))
        distances, ids = self._tree.query(
            queries, k=k, distance_upper_bound=distance_upper_bound
        )
        if k > 1:
            return distances, ids
        return np.atleast_1d(distances), np.atleast_1d(ids)


def build_index(cloud: PointCloud) -> NeighborIndex:
    return NeighborIndex(cloud)
