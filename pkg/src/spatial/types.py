"""Types for neighbour search and oriented points."""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray


class OrientedPoint(NamedTuple):
    position: NDArray
    normal: NDArray


@dataclass(frozen=True, eq=False)
class OrientedCloud:
    """Positions with unit normals; row ``i`` of both arrays is one OrientedPoint."""

    positions: NDArray
    normals: NDArray
    frame_id: str = "cloud"

    def __len__(self) -> int:
        return len(self.positions)

    def __getitem__(self, index: int) -> OrientedPoint:
        return OrientedPoint(self.positions[index], self.normals[index])

    def shifted(self, offset: NDArray) -> "OrientedCloud":
        """Same surface expressed in a frame translated by ``offset``."""
        return OrientedCloud(
            self.positions + np.asarray(offset, dtype=np.float64),
            self.normals,
            self.frame_id,
        )
