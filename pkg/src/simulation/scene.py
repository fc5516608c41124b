"""Surface sampling of the synthetic road scene."""

import logging
import math

import numpy as np
from numpy.typing import NDArray

from src.errors import InvalidArgumentError
from src.geometry import PointCloud, rotation_z
from src.simulation.types import SHAPE_SIZE_ARITY, Primitive, Scene, SceneSpec, Shape


logger = logging.getLogger(__name__)


def _count(area: float, density: float) -> int:
    return round(area * density)


def _rectangle(rng: np.random.Generator, n: int, u: tuple[float, float], v: tuple[float, float]) -> NDArray:
    return np.column_stack([rng.uniform(*u, size=n), rng.uniform(*v, size=n)])


def _wall(rng: np.random.Generator, size: tuple[float, ...], density: float) -> NDArray:
    length, height = size
    uv = _rectangle(rng, _count(length * height, density), (-length / 2, length / 2), (0.0, height))
    return np.column_stack([uv[:, 0], np.zeros(len(uv)), uv[:, 1]])


def _box(rng: np.random.Generator, size: tuple[float, ...], density: float) -> NDArray:
    length, width, height = size
    hl, hw = length / 2, width / 2
    faces = []
    top = _rectangle(rng, _count(length * width, density), (-hl, hl), (-hw, hw))
    faces.append(np.column_stack([top, np.full(len(top), height)]))
    for sign in (-1.0, 1.0):
        side = _rectangle(rng, _count(width * height, density), (-hw, hw), (0.0, height))
        faces.append(np.column_stack([np.full(len(side), sign * hl), side[:, 0], side[:, 1]]))
    for sign in (-1.0, 1.0):
        side = _rectangle(rng, _count(length * height, density), (-hl, hl), (0.0, height))
        faces.append(np.column_stack([side[:, 0], np.full(len(side), sign * hw), side[:, 1]]))
    return np.vstack(faces)


def _cylinder(rng: np.random.Generator, size: tuple[float, ...], density: float) -> NDArray:
    radius, height = size
    n = _count(2 * math.pi * radius * height, density)
    theta = rng.uniform(0.0, 2 * math.pi, size=n)
    z = rng.uniform(0.0, height, size=n)
    return np.column_stack([radius * np.cos(theta), radius * np.sin(theta), z])


_SAMPLERS = {Shape.WALL: _wall, Shape.BOX: _box, Shape.CYLINDER: _cylinder}


def _validate(spec: SceneSpec) -> None:
    if spec.ground_density <= 0 or spec.primitive_density <= 0:
        raise InvalidArgumentError("point densities must be positive")
    if min(spec.ground_extent) <= 0 or spec.noise_sigma < 0:
        raise InvalidArgumentError("ground extent must be positive and noise non-negative")
    if not spec.primitives and not spec.allow_degenerate:
        raise InvalidArgumentError(
            "scene has no structure besides the ground; set allow_degenerate to build it anyway"
        )
    for i, primitive in enumerate(spec.primitives):
        if len(primitive.size) != SHAPE_SIZE_ARITY[primitive.shape]:
            raise InvalidArgumentError(
                f"primitive {i} ({primitive.shape}) needs {SHAPE_SIZE_ARITY[primitive.shape]} sizes"
            )
        if min(primitive.size) <= 0:
            raise InvalidArgumentError(f"primitive {i} has a non-positive size")
        if primitive.density is not None and primitive.density <= 0:
            raise InvalidArgumentError(f"primitive {i} has a non-positive density")


def _place(points: NDArray, primitive: Primitive) -> NDArray:
    x, y = primitive.center
    return points @ rotation_z(primitive.yaw).T + np.array([x, y, 0.0])


def generate_scene(spec: SceneSpec) -> Scene:
    """Sample the ground rectangle and every primitive; deterministic per ``spec.seed``."""
    _validate(spec)
    rng = np.random.default_rng(spec.seed)

    length, width = spec.ground_extent
    ground = _rectangle(
        rng,
        _count(length * width, spec.ground_density),
        (-length / 2, length / 2),
        (-width / 2, width / 2),
    )
    parts = [np.column_stack([ground, np.zeros(len(ground))])]
    labels = [np.zeros(len(ground), dtype=np.int64)]

    for i, primitive in enumerate(spec.primitives):
        density = primitive.density or spec.primitive_density
        local = _SAMPLERS[primitive.shape](rng, primitive.size, density)
        parts.append(_place(local, primitive))
        labels.append(np.full(len(local), i + 1, dtype=np.int64))

    points = np.vstack(parts)
    if spec.noise_sigma > 0:
        points = points + rng.normal(0.0, spec.noise_sigma, size=points.shape)

    logger.debug(
        "scene: %d points (%d ground, %d primitives)",
        len(points),
        len(ground),
        len(spec.primitives),
    )
    return Scene(PointCloud(points, "world"), np.concatenate(labels))


def _polar(rng: np.random.Generator, inner: float, outer: float) -> tuple[float, float, float]:
    radius = rng.uniform(inner, outer)
    bearing = rng.uniform(-math.pi, math.pi)
    return radius * math.cos(bearing), radius * math.sin(bearing), bearing


def random_layout(
    base: SceneSpec,
    seed: int,
    walls: int = 3,
    boxes: int = 4,
    poles: int = 6,
) -> SceneSpec:
    """A fresh arrangement of walls, boxes and poles on the ground of ``base``.

    Walls run roughly tangential to the origin so none crosses the rig.
    Deterministic per ``seed``, which also becomes the sampling seed.
    """
    if min(walls, boxes, poles) < 0 or walls + boxes + poles == 0:
        raise InvalidArgumentError("a layout needs a non-negative count of each shape and at least one")
    rng = np.random.default_rng(seed)
    outer = max(0.4 * min(base.ground_extent), 11.0)

    primitives = []
    for _ in range(walls):
        x, y, bearing = _polar(rng, 10.0, outer)
        yaw = bearing + math.pi / 2 + rng.uniform(-math.pi / 6, math.pi / 6)
        size = (rng.uniform(8.0, 18.0), rng.uniform(2.5, 4.0))
        primitives.append(Primitive(Shape.WALL, (x, y), yaw, size))
    for _ in range(boxes):
        x, y, _ = _polar(rng, 7.0, outer)
        size = (rng.uniform(2.0, 5.0), rng.uniform(2.0, 6.0), rng.uniform(1.5, 3.0))
        primitives.append(Primitive(Shape.BOX, (x, y), rng.uniform(-math.pi, math.pi), size))
    for _ in range(poles):
        x, y, _ = _polar(rng, 4.0, outer)
        size = (rng.uniform(0.15, 0.3), rng.uniform(4.0, 6.0))
        primitives.append(Primitive(Shape.CYLINDER, (x, y), 0.0, size))

    return base._replace(primitives=tuple(primitives), seed=seed)
