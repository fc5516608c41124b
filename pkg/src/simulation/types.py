"""Scene, rig and perturbation descriptions for the synthetic capture generator."""

import math
from dataclasses import dataclass
from enum import StrEnum
from typing import NamedTuple

import numpy as np
from numpy.typing import NDArray

from src.constants import MASTER_FRAME_ID
from src.errors import InvalidArgumentError
from src.geometry import PointCloud, RigidTransform


class Shape(StrEnum):
    WALL = "wall"  # size: (length, height)
    BOX = "box"  # size: (length, width, height)
    CYLINDER = "cylinder"  # size: (radius, height)


SHAPE_SIZE_ARITY = {Shape.WALL: 2, Shape.BOX: 3, Shape.CYLINDER: 2}


class Primitive(NamedTuple):
    """Vertical structure standing on z = 0, centred at (x, y) and turned by ``yaw`` radians."""

    shape: Shape
    center: tuple[float, float]
    yaw: float
    size: tuple[float, ...]
    density: float | None = None


class SceneSpec(NamedTuple):
    ground_extent: tuple[float, float] = (60.0, 60.0)
    ground_density: float = 3.0
    primitives: tuple[Primitive, ...] = ()
    primitive_density: float = 20.0
    noise_sigma: float = 0.0
    seed: int = 0
    allow_degenerate: bool = False


class Scene(NamedTuple):
    """World-frame surface samples; label 0 is ground, ``i + 1`` is primitive ``i``."""

    cloud: PointCloud
    labels: NDArray

    def __len__(self) -> int:
        return len(self.cloud)


class SensorSpec(NamedTuple):
    frame_id: str
    pose: RigidTransform  # sensor -> vehicle


@dataclass(frozen=True)
class RigSpec:
    """Sensor set with exactly one master and at least one slave."""

    sensors: tuple[SensorSpec, ...]
    max_range: float = math.inf
    fov: float = 360.0  # degrees, horizontal, centred on the sensor x-axis
    noise_sigma: float = 0.0
    seed: int = 0
    master_id: str = MASTER_FRAME_ID

    def __post_init__(self) -> None:
        ids = [sensor.frame_id for sensor in self.sensors]
        if len(set(ids)) != len(ids):
            raise InvalidArgumentError(f"duplicate sensor ids in rig: {ids}")
        if ids.count(self.master_id) != 1:
            raise InvalidArgumentError(f"rig needs exactly one master '{self.master_id}'")
        if len(ids) < 2:
            raise InvalidArgumentError("rig needs at least one slave")
        if self.max_range <= 0 or self.fov <= 0 or self.noise_sigma < 0:
            raise InvalidArgumentError("max_range and fov must be positive, noise non-negative")

    @property
    def master(self) -> SensorSpec:
        return next(sensor for sensor in self.sensors if sensor.frame_id == self.master_id)

    @property
    def slaves(self) -> tuple[SensorSpec, ...]:
        return tuple(sensor for sensor in self.sensors if sensor.frame_id != self.master_id)

    def sensor(self, frame_id: str) -> SensorSpec:
        for sensor in self.sensors:
            if sensor.frame_id == frame_id:
                return sensor
        raise KeyError(frame_id)


class PerturbationSpec(NamedTuple):
    rotation_bound: float = math.radians(45.0)
    translation_bound: float = 0.10
    seed: int = 0


class CaptureSet(NamedTuple):
    clouds: dict[str, PointCloud]
    labels: dict[str, NDArray]
    sparse: tuple[str, ...] = ()

    def cloud(self, frame_id: str) -> PointCloud:
        return self.clouds[frame_id]

    def label_counts(self, frame_id: str) -> dict[int, int]:
        values, counts = np.unique(self.labels[frame_id], return_counts=True)
        return dict(zip(values.tolist(), counts.tolist(), strict=True))
