"""RANSAC ground-plane extraction.

Use fit_ground_plane() as the entry point. The ground is read as the plane
with the most points inside a slab of thickness ``epsilon``.
"""

import logging

import numpy as np
from numpy.typing import NDArray

from src.constants import (
    GROUND_EPSILON_M,
    MIN_GROUND_CLOUD_POINTS,
    MIN_GROUND_INLIER_FRACTION,
    RANSAC_ITERATIONS,
)
from src.errors import InvalidArgumentError, NoGroundFoundError
from src.geometry import PointCloud, RigidTransform
from src.ground.types import Plane


logger = logging.getLogger(__name__)


def _least_squares_plane(points: NDArray) -> tuple[NDArray, float]:
    """Total least-squares plane through ``points`` (normal, offset)."""
    centroid = points.mean(axis=0)
    centered = points - centroid
    _, eigenvectors = np.linalg.eigh(centered.T @ centered)
    normal = eigenvectors[:, 0]
    return normal, float(-normal @ centroid)


def _oriented(normal: NDArray, offset: float) -> tuple[NDArray, float]:
    """Flip so the frame origin is on the positive side."""
    if offset < 0 or (offset == 0 and normal[2] < 0):
        return -normal, -offset
    return normal, offset


def fit_ground_plane(
    cloud: PointCloud,
    epsilon: float = GROUND_EPSILON_M,
    iterations: int = RANSAC_ITERATIONS,
    seed: int = 0,
) -> Plane:
    """Fit the dominant plane by RANSAC, then refit it by least squares.

    Deterministic for a given (cloud, epsilon, iterations, seed).
    """
    if epsilon <= 0:
        raise InvalidArgumentError(f"plane thickness must be positive, got {epsilon}")
    if iterations < 1:
        raise InvalidArgumentError(f"iterations must be >= 1, got {iterations}")

    points = cloud.points
    n = len(points)
    if n < MIN_GROUND_CLOUD_POINTS:
        raise NoGroundFoundError(
            f"cloud '{cloud.frame_id}' has {n} points; "
            f"at least {MIN_GROUND_CLOUD_POINTS} are needed to extract a ground plane"
        )

    rng = np.random.default_rng(seed)
    samples = rng.integers(0, n, size=(iterations, 3))
    p0, p1, p2 = (points[samples[:, i]] for i in range(3))
    normals = np.cross(p1 - p0, p2 - p0)
    norms = np.linalg.norm(normals, axis=1)
    extent = float(np.ptp(points, axis=0).max())
    usable = np.flatnonzero(norms > 1e-10 * max(1.0, extent**2))
    if len(usable) == 0:
        raise NoGroundFoundError(
            f"cloud '{cloud.frame_id}' has fewer than 3 non-collinear points"
        )

    best_count = 0
    best_mask: NDArray | None = None
    for i in usable:
        normal = normals[i] / norms[i]
        mask = np.abs(points @ normal - normal @ p0[i]) <= epsilon
        count = int(np.count_nonzero(mask))
        if count > best_count:
            best_count, best_mask = count, mask

    if best_mask is None or best_count < MIN_GROUND_INLIER_FRACTION * n:
        raise NoGroundFoundError(
            f"best plane in '{cloud.frame_id}' holds {best_count}/{n} points, "
            f"below the {MIN_GROUND_INLIER_FRACTION:.0%} minimum"
        )

    normal, offset = _least_squares_plane(points[best_mask])
    inliers = np.flatnonzero(np.abs(points @ normal + offset) <= epsilon)
    if len(inliers) < 3:
        inliers = np.flatnonzero(best_mask)
    normal, offset = _oriented(normal, offset)

    logger.debug(
        "ground of '%s': normal=%s d=%.4f inliers=%d/%d",
        cloud.frame_id,
        np.round(normal, 5),
        offset,
        len(inliers),
        n,
    )
    return Plane(
        float(normal[0]), float(normal[1]), float(normal[2]), offset, inliers
    )


def transform_plane(transform: RigidTransform, plane: Plane) -> Plane:
    """The same plane expressed in the frame ``transform`` maps into."""
    normal = transform.rotation @ plane.normal
    offset = plane.d - float(normal @ transform.translation)
    return Plane(
        float(normal[0]), float(normal[1]), float(normal[2]), offset, plane.inlier_ids
    )
