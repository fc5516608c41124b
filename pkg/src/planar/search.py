"""Planar search: recover yaw, x and y once ground alignment fixed the rest.

Use search_planar() as the entry point. Both clouds are ground-removed and
voxel-downsampled; the slave is moved by Rz(yaw) then (x, y, 0) and scored by
the mean squared distance to its nearest master point inside a gate.
"""

import itertools
import logging
import math
from collections.abc import Iterable
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from src.constants import GROUND_EPSILON_M, MIN_NON_GROUND_POINTS
from src.errors import DegenerateSceneError, InvalidArgumentError, NoOverlapError
from src.geometry import PointCloud, rotation_z
from src.ground import Plane
from src.planar.types import PlanarEstimate, PlanarSearchConfig
from src.spatial import NeighborIndex, build_index


logger = logging.getLogger(__name__)

MAX_PATTERN_MOVES = 64

# every (yaw, x, y) neighbour on the current step lattice
_PATTERN = tuple(move for move in itertools.product((-1, 0, 1), repeat=3) if any(move))


class _Candidate(NamedTuple):
    cost: float
    yaw: float
    x: float
    y: float

    def key(self) -> tuple[float, float, float, float]:
        return (self.cost, abs(self.yaw), abs(self.x), abs(self.y))


def remove_ground(
    cloud: PointCloud,
    plane: Plane,
    epsilon: float = GROUND_EPSILON_M,
) -> PointCloud:
    """Drop points within ``epsilon`` of the ground plane."""
    keep = np.abs(plane.signed_distances(cloud.points)) > epsilon
    remaining = int(np.count_nonzero(keep))
    if remaining < MIN_NON_GROUND_POINTS:
        raise DegenerateSceneError(
            f"only {remaining} non-ground points left in '{cloud.frame_id}' "
            f"(need {MIN_NON_GROUND_POINTS}); the scene has nothing to register yaw on"
        )
    return cloud.subset(np.flatnonzero(keep))


def _gated_distances(
    index: NeighborIndex,
    slave: NDArray,
    yaw: float,
    x: float,
    y: float,
    gate: float,
) -> NDArray:
    moved = slave @ rotation_z(yaw).T + np.array([x, y, 0.0])
    distances, _ = index.query(moved, k=1, distance_upper_bound=gate)
    return distances[np.isfinite(distances)]


def reduced_cost(
    master_ng: PointCloud | NeighborIndex,
    slave_ng: PointCloud,
    yaw: float,
    x: float,
    y: float,
    cfg: PlanarSearchConfig | None = None,
) -> float:
    """Mean squared gated nearest-neighbour distance; ``inf`` without enough pairs."""
    if cfg is None:
        cfg = PlanarSearchConfig()
    index = master_ng if isinstance(master_ng, NeighborIndex) else build_index(master_ng)
    gated = _gated_distances(
        index, slave_ng.points, yaw, x, y, cfg.max_correspondence_dist
    )
    if len(gated) == 0 or len(gated) < cfg.min_correspondences:
        return math.inf
    return float(np.mean(gated**2))


def _wrap(angle: float) -> float:
    return math.atan2(math.sin(angle), math.cos(angle))


def _coarse_yaws(cfg: PlanarSearchConfig) -> list[float]:
    half_range = min(cfg.yaw_range / 2.0, math.pi)
    count = int(math.floor(half_range / cfg.coarse_step + 1e-9))
    yaws = [k * cfg.coarse_step for k in range(-count, count + 1)]
    # -π and +π are the same heading
    if yaws and math.isclose(yaws[0], -math.pi) and math.isclose(yaws[-1], math.pi):
        yaws = yaws[1:]
    return yaws


def _local_minima(coarse: list[_Candidate], count: int) -> list[_Candidate]:
    """The ``count`` best coarse cells no costlier than their neighbours."""
    finite = [c for c in coarse if math.isfinite(c.cost)]
    circular = len(coarse) > 2 and math.isclose(
        _wrap(coarse[-1].yaw + (coarse[1].yaw - coarse[0].yaw)), coarse[0].yaw, abs_tol=1e-9
    )
    minima = []
    for i, c in enumerate(coarse):
        if not math.isfinite(c.cost):
            continue
        neighbours = []
        if i > 0 or circular:
            neighbours.append(coarse[i - 1])
        if i + 1 < len(coarse) or circular:
            neighbours.append(coarse[(i + 1) % len(coarse)])
        if all(c.cost <= n.cost for n in neighbours):
            minima.append(c)
    ranked = sorted(minima or finite, key=_Candidate.key)
    return ranked[:count]


def _validate(cfg: PlanarSearchConfig) -> None:
    if min(cfg.coarse_step, cfg.xy_step, cfg.max_correspondence_dist) <= 0:
        raise InvalidArgumentError("planar search steps and gate must be positive")
    if min(cfg.refine_levels, cfg.alternations, cfg.yaw_seeds) < 1:
        raise InvalidArgumentError("refine_levels, alternations and yaw_seeds must be >= 1")
    if cfg.yaw_range <= 0 or cfg.xy_range < 0:
        raise InvalidArgumentError("search ranges must be positive")


def search_planar(
    master_ng: PointCloud,
    slave_ng: PointCloud,
    cfg: PlanarSearchConfig | None = None,
) -> PlanarEstimate:
    """Coarse yaw grid, x/y grid scans from the best few yaw minima, then a
    joint (yaw, x, y) pattern search whose steps halve once nothing improves.

    Deterministic; ties go to smaller |yaw|, then |x|, then |y|.
    """
    if cfg is None:
        cfg = PlanarSearchConfig()
    _validate(cfg)

    index = build_index(master_ng)
    evaluations = 0

    def evaluate(yaw: float, x: float, y: float) -> _Candidate:
        nonlocal evaluations
        evaluations += 1
        return _Candidate(reduced_cost(index, slave_ng, yaw, x, y, cfg), yaw, x, y)

    def best_of(incumbent: _Candidate, candidates: Iterable[_Candidate]) -> _Candidate:
        for candidate in candidates:
            if candidate.key() < incumbent.key():
                incumbent = candidate
        return incumbent

    coarse = [evaluate(yaw, 0.0, 0.0) for yaw in _coarse_yaws(cfg)]
    finite_costs = np.array([c.cost for c in coarse if math.isfinite(c.cost)])
    if len(finite_costs) == 0:
        raise NoOverlapError(
            f"'{slave_ng.frame_id}' has no gated correspondences at any coarse yaw"
        )
    incumbent = best_of(coarse[0], coarse[1:])

    median_cost = float(np.median(finite_costs))
    ratio = incumbent.cost / median_cost if median_cost > 0 else 1.0
    low_confidence = ratio > cfg.low_confidence_ratio
    if low_confidence:
        logger.warning(
            "yaw of '%s' is poorly constrained (best/median cost ratio %.2f)",
            slave_ng.frame_id,
            ratio,
        )

    xy_grid_count = int(math.floor(cfg.xy_range / cfg.xy_step + 1e-9))
    xy_grid = [k * cfg.xy_step for k in range(-xy_grid_count, xy_grid_count + 1)]

    def grid_scan(start: _Candidate) -> _Candidate:
        best = start
        for _ in range(cfg.alternations):
            c = best
            best = best_of(best, (evaluate(c.yaw, x, c.y) for x in xy_grid))
            c = best
            best = best_of(best, (evaluate(c.yaw, c.x, y) for y in xy_grid))
        return best

    # the shift can pull the true heading off the best x = y = 0 cell
    seeded = [grid_scan(seed) for seed in _local_minima(coarse, cfg.yaw_seeds)]
    incumbent = best_of(seeded[0], seeded[1:])

    step = cfg.coarse_step
    xy_step = cfg.xy_step
    for level in range(cfg.refine_levels + 1):
        if level > 0:
            step /= 2.0
            xy_step /= 2.0
        for _ in range(MAX_PATTERN_MOVES):
            c = incumbent
            incumbent = best_of(
                incumbent,
                (
                    evaluate(_wrap(c.yaw + dyaw * step), c.x + dx * xy_step, c.y + dy * xy_step)
                    for dyaw, dx, dy in _PATTERN
                ),
            )
            if incumbent is c:
                break

    correspondences = len(
        _gated_distances(
            index,
            slave_ng.points,
            incumbent.yaw,
            incumbent.x,
            incumbent.y,
            cfg.max_correspondence_dist,
        )
    )
    logger.debug(
        "planar search of '%s': yaw=%.3f° x=%.3f y=%.3f cost=%.5f (%d evaluations)",
        slave_ng.frame_id,
        math.degrees(incumbent.yaw),
        incumbent.x,
        incumbent.y,
        incumbent.cost,
        evaluations,
    )
    return PlanarEstimate(
        yaw=incumbent.yaw,
        x=incumbent.x,
        y=incumbent.y,
        cost=incumbent.cost,
        correspondence_count=correspondences,
        low_confidence=low_confidence,
        evaluations=evaluations,
    )
