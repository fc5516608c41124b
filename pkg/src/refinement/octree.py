"""Octree occupancy volume and the coordinate-descent scan that minimises it.

The root cube is cut recursively into eight children down to the leaf level.
A cube holding at least one point is "blue", an empty child of a blue parent
is "green". Blue plus green volume tiles the root cube; only the blue leaf
volume is minimised. Leaves sit on a lattice anchored at the frame origin, so
occupancy reduces to counting distinct integer leaf keys per level.
"""

import logging
import math

import numpy as np
from numpy.typing import ArrayLike, NDArray

from src.constants import EULER_AXES, ROOT_CUBE_MARGIN, ROTATION_AXES
from src.errors import InvalidArgumentError
from src.geometry import EulerPose, PointCloud, RigidTransform, euler_to_transform
from src.refinement.types import OctreeDescent, OctreeGrid, OctreeScanConfig, OctreeVolume


logger = logging.getLogger(__name__)

# 21 bits per axis, offset so that cells left of the origin stay non-negative.
_KEY_BITS = 21
_KEY_OFFSET = 1 << (_KEY_BITS - 1)
_SCAN_ORDER = ("yaw", "pitch", "roll", "x", "y", "z")


def _validate(cfg: OctreeScanConfig) -> None:
    if cfg.max_depth < 0 or cfg.target_leaf_side <= 0:
        raise InvalidArgumentError("octree depth must be >= 0 and leaf side positive")
    if cfg.angle_step_init <= 0 or cfg.trans_step_init <= 0:
        raise InvalidArgumentError("octree scan steps must be positive")
    if cfg.halvings < 1 or cfg.sweep_halfwidth < 1:
        raise InvalidArgumentError("octree scan needs halvings >= 1 and sweep_halfwidth >= 1")


def _snapped_origin(lo: NDArray, hi: NDArray, leaf: float, root_side: float) -> NDArray:
    center = (lo + hi) / 2.0
    return np.floor((center - root_side / 2.0) / leaf) * leaf


def octree_grid(points: ArrayLike, cfg: OctreeScanConfig | None = None) -> OctreeGrid:
    """Root cube over ``points``: bounding cube grown by 5% and snapped to the leaf lattice."""
    if cfg is None:
        cfg = OctreeScanConfig()
    _validate(cfg)
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    if len(pts) == 0:
        raise InvalidArgumentError("octree needs a non-empty cloud")

    lo, hi = pts.min(axis=0), pts.max(axis=0)
    side = max(float((hi - lo).max()) * (1.0 + ROOT_CUBE_MARGIN), cfg.target_leaf_side)
    target = cfg.target_leaf_side
    depth = max(0, math.ceil(math.log2(side / target) - 1e-12))
    leaf = target
    if depth > cfg.max_depth:
        growth = math.ceil(math.log2(side / (target * 2**cfg.max_depth)) - 1e-12)
        depth, leaf = cfg.max_depth, target * 2**growth

    origin = _snapped_origin(lo, hi, leaf, leaf * 2**depth)
    # Snapping down can leave the max corner uncovered by less than one leaf.
    while np.any(origin + leaf * 2**depth < hi):
        if depth < cfg.max_depth:
            depth += 1
        else:
            leaf *= 2.0
        origin = _snapped_origin(lo, hi, leaf, leaf * 2**depth)
    return OctreeGrid(origin, leaf, depth)


def leaf_keys(points: ArrayLike, grid: OctreeGrid) -> NDArray:
    """Integer (i, j, k) leaf index of every point, shape (N, 3)."""
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 3)
    return np.floor((pts - grid.origin) / grid.leaf_side).astype(np.int64)


def _pack(keys: NDArray) -> NDArray:
    shifted = keys + _KEY_OFFSET
    return (shifted[:, 0] << (2 * _KEY_BITS)) | (shifted[:, 1] << _KEY_BITS) | shifted[:, 2]


def _occupied_codes(points: NDArray, grid: OctreeGrid) -> NDArray:
    return np.unique(_pack(leaf_keys(points, grid)))


def octree_volume(
    merged: PointCloud,
    cfg: OctreeScanConfig | None = None,
    grid: OctreeGrid | None = None,
) -> OctreeVolume:
    if len(merged) == 0:
        raise InvalidArgumentError("octree needs a non-empty cloud")
    if grid is None:
        grid = octree_grid(merged.points, cfg)
    keys = leaf_keys(merged.points, grid)
    level_counts = tuple(
        int(np.unique(_pack(keys >> (grid.depth - level))).size)
        for level in range(grid.depth + 1)
    )
    return OctreeVolume(grid, level_counts)


def _axis_delta(axis: str, offset: float) -> RigidTransform:
    values = dict.fromkeys(EULER_AXES, 0.0)
    values[axis] = offset
    return euler_to_transform(EulerPose(**values))


def octree_descent(
    master: PointCloud,
    slave: PointCloud,
    initial: RigidTransform,
    cfg: OctreeScanConfig | None = None,
) -> OctreeDescent:
    """Coordinate descent of the merged occupied volume over the six pose axes.

    Each candidate is ``delta ∘ incumbent`` with ``delta`` a single-axis
    offset, so rotations pivot about the frame origin. Only strict decreases
    replace the incumbent. Steps halve after every full pass.
    """
    if cfg is None:
        cfg = OctreeScanConfig()
    _validate(cfg)
    if len(master) == 0 or len(slave) == 0:
        raise InvalidArgumentError("octree scan needs non-empty master and slave clouds")

    grid = octree_grid(
        np.vstack([master.points, initial.transform_points(slave.points)]), cfg
    )
    master_codes = _occupied_codes(master.points, grid)
    leaf_volume = grid.leaf_side**3

    def merged_count(pose: RigidTransform) -> int:
        slave_codes = _occupied_codes(pose.transform_points(slave.points), grid)
        shared = np.isin(slave_codes, master_codes, assume_unique=True)
        return len(master_codes) + len(slave_codes) - int(np.count_nonzero(shared))

    offsets = [sign * j for j in range(1, cfg.sweep_halfwidth + 1) for sign in (-1, 1)]
    incumbent, best = initial, merged_count(initial)
    history = [best * leaf_volume]
    evaluations = 1
    angle_step, trans_step = cfg.angle_step_init, cfg.trans_step_init

    for _ in range(cfg.halvings):
        for axis in _SCAN_ORDER:
            step = angle_step if axis in ROTATION_AXES else trans_step
            sweep_best, sweep_pose = best, incumbent
            for offset in offsets:
                candidate = _axis_delta(axis, offset * step).compose(incumbent)
                count = merged_count(candidate)
                evaluations += 1
                if count < sweep_best:
                    sweep_best, sweep_pose = count, candidate
            incumbent, best = sweep_pose, sweep_best
            history.append(best * leaf_volume)
        angle_step /= 2.0
        trans_step /= 2.0

    logger.debug(
        "octree scan on '%s': %d -> %d occupied leaves (leaf %.3f m, %d evaluations)",
        slave.frame_id,
        round(history[0] / leaf_volume),
        best,
        grid.leaf_side,
        evaluations,
    )
    return OctreeDescent(incumbent, history[0], history[-1], tuple(history), evaluations)


def octree_refine(
    master: PointCloud,
    slave: PointCloud,
    initial: RigidTransform,
    cfg: OctreeScanConfig | None = None,
) -> RigidTransform:
    """Slave → master pose minimising the occupied volume of the merged cloud."""
    return octree_descent(master, slave, initial, cfg).transform
