"""Configuration and result types for the refinement stage."""

import math
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from src.constants import NORMAL_NEIGHBORS
from src.geometry import RigidTransform


class IcpnConfig(NamedTuple):
    max_iterations: int = 50
    max_correspondence_dist: float = 0.5
    normal_angle_gate: float = 45.0  # degrees
    convergence_translation: float = 1e-4
    convergence_rotation: float = 1e-5
    normal_k: int = NORMAL_NEIGHBORS


class IcpnResult(NamedTuple):
    """Increment to compose onto the input pose (``transform ∘ initial``)."""

    transform: RigidTransform
    iterations_used: int
    final_cost: float
    converged: bool
    cost_history: tuple[float, ...] = ()


class PointToPlaneSystem(NamedTuple):
    """Linearised point-to-plane residuals at one pose.

    Row ``i`` of ``jacobian`` is ``[(x_i × n_i)ᵀ, n_iᵀ]`` for the increment
    (rotation vector, translation).
    """

    jacobian: NDArray
    residuals: NDArray
    cost: float
    correspondence_count: int


class OctreeScanConfig(NamedTuple):
    max_depth: int = 8
    target_leaf_side: float = 0.1
    angle_step_init: float = math.radians(0.5)
    trans_step_init: float = 0.05
    halvings: int = 4
    sweep_halfwidth: int = 4


class OctreeGrid(NamedTuple):
    """Root cube whose min corner sits on the leaf lattice anchored at the frame origin."""

    origin: NDArray
    leaf_side: float
    depth: int

    @property
    def root_side(self) -> float:
        return self.leaf_side * 2**self.depth

    @property
    def root_center(self) -> NDArray:
        return np.asarray(self.origin) + self.root_side / 2.0


class OctreeVolume(NamedTuple):
    """Occupied (blue) cube bookkeeping; ``level_counts[l]`` counts blue cubes at depth l."""

    grid: OctreeGrid
    level_counts: tuple[int, ...]

    @property
    def root_center(self) -> NDArray:
        return self.grid.root_center

    @property
    def root_side(self) -> float:
        return self.grid.root_side

    @property
    def max_depth(self) -> int:
        return self.grid.depth

    @property
    def leaf_side(self) -> float:
        return self.grid.leaf_side

    @property
    def occupied_leaf_count(self) -> int:
        return self.level_counts[-1]

    @property
    def occupied_volume(self) -> float:
        return self.occupied_leaf_count * self.leaf_side**3

    @property
    def empty_cube_counts(self) -> tuple[int, ...]:
        """Green cubes per level: children of blue parents that hold no point."""
        return tuple(
            8 * parent - child
            for parent, child in zip(self.level_counts, self.level_counts[1:], strict=False)
        )

    @property
    def empty_volume(self) -> float:
        return sum(
            count * (self.root_side / 2**level) ** 3
            for level, count in enumerate(self.empty_cube_counts, start=1)
        )


class OctreeDescent(NamedTuple):
    transform: RigidTransform
    initial_volume: float
    final_volume: float
    volume_history: tuple[float, ...]
    evaluations: int
