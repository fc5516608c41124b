"""PCA surface normals from k-nearest neighbourhoods."""

import numpy as np
from numpy.typing import ArrayLike

from src.constants import NORMAL_NEIGHBORS
from src.errors import InvalidArgumentError
from src.geometry import PointCloud
from src.spatial.index import build_index
from src.spatial.types import OrientedCloud


def estimate_normals(
    cloud: PointCloud,
    k: int = NORMAL_NEIGHBORS,
    viewpoint: ArrayLike = (0.0, 0.0, 0.0),
) -> OrientedCloud:
    """Smallest-eigenvalue eigenvector of each point's k-NN covariance.

    Normals are flipped to face ``viewpoint`` (the sensor origin by default).
    """
    if k < 3:
        raise InvalidArgumentError(f"normal estimation needs k >= 3, got {k}")
    if len(cloud) < k:
        raise InvalidArgumentError(
            f"cloud '{cloud.frame_id}' has {len(cloud)} points, fewer than k={k}"
        )

    points = cloud.points
    _, neighbor_ids = build_index(cloud).query(points, k=k)
    neighbors = points[neighbor_ids]
    centered = neighbors - neighbors.mean(axis=1, keepdims=True)
    covariances = np.einsum("nki,nkj->nij", centered, centered) / k

    # eigh sorts eigenvalues ascending; column 0 is the normal direction
    _, eigenvectors = np.linalg.eigh(covariances)
    normals = eigenvectors[:, :, 0]
    normals /= np.linalg.norm(normals, axis=1, keepdims=True)

    to_viewpoint = np.asarray(viewpoint, dtype=np.float64) - points
    facing_away = np.einsum("ij,ij->i", normals, to_viewpoint) < 0
    normals[facing_away] *= -1.0

    return OrientedCloud(points, normals, cloud.frame_id)
