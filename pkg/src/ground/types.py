"""Ground plane and ground alignment types."""

from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from src.geometry import RigidTransform


class Plane(NamedTuple):
    """Plane ``a*x + b*y + c*z + d = 0`` with unit normal (a, b, c)."""

    a: float
    b: float
    c: float
    d: float
    inlier_ids: NDArray

    @property
    def normal(self) -> NDArray:
        return np.array([self.a, self.b, self.c])

    @property
    def inlier_count(self) -> int:
        return len(self.inlier_ids)

    def signed_distances(self, points: NDArray) -> NDArray:
        return points @ self.normal + self.d


class GroundAlignment(NamedTuple):
    """Pitch/roll/z correction taking the slave ground onto the master ground.

    ``residual_inlier_fraction`` stays ``None`` until verify_ground_side runs.
    """

    transform: RigidTransform
    flip_applied: bool = False
    residual_inlier_fraction: float | None = None
