"""Ground alignment: resolve pitch, roll and z of a slave against the master.

Use align_ground() then verify_ground_side(). The first rotates the slave
ground normal onto the master normal (Rodrigues construction) and shifts
along the master normal; the second catches the ±π ambiguity where the
slave lands upside down on the right plane.
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray

from src.constants import FLIP_SUPPORT_RATIO, GROUND_EPSILON_M
from src.errors import AmbiguousGroundError
from src.geometry import PointCloud, RigidTransform, rodrigues
from src.ground.plane import transform_plane
from src.ground.types import GroundAlignment, Plane


logger = logging.getLogger(__name__)

_PARALLEL_TOLERANCE = 1e-12


def _perpendicular_axis(normal: NDArray) -> NDArray:
    """Deterministic unit vector orthogonal to ``normal``."""
    basis = np.eye(3)[int(np.argmin(np.abs(normal)))]
    axis = np.cross(normal, basis)
    return axis / np.linalg.norm(axis)


def align_ground(master: Plane, slave: Plane) -> GroundAlignment:
    """Rotate the slave normal onto the master normal, then close the offset gap.

    The rotation axis is the normalised cross product of the two normals and
    the angle comes from their dot product. Anti-parallel normals take the
    half-turn about an in-plane axis.
    """
    n_master = master.normal
    n_slave = slave.normal
    axis = np.cross(n_slave, n_master)
    sine = float(np.linalg.norm(axis))
    cosine = float(np.clip(n_slave @ n_master, -1.0, 1.0))

    flip_applied = False
    if sine < _PARALLEL_TOLERANCE and cosine > 0:
        rotation = RigidTransform.identity()
    elif sine < _PARALLEL_TOLERANCE:
        rotation = rodrigues(_perpendicular_axis(n_slave), math.pi)
        flip_applied = True
    else:
        rotation = rodrigues(axis / sine, math.atan2(sine, cosine))

    shift = (slave.d - master.d) * n_master
    transform = RigidTransform(rotation.rotation, shift)
    return GroundAlignment(transform, flip_applied)


def _half_turn_in_plane(master: Plane) -> RigidTransform:
    """Half-turn about an axis lying in the master plane; keeps the plane, swaps its sides."""
    normal = master.normal
    rotation = rodrigues(_perpendicular_axis(normal), math.pi).rotation
    return RigidTransform(rotation, -2.0 * master.d * normal)


def _side_support(
    points: NDArray,
    transform: RigidTransform,
    master: Plane,
    epsilon: float,
) -> tuple[float, float, float, float]:
    """Fractions (on plane, above, on-or-above, sensor-side reference) for one candidate."""
    signed = master.signed_distances(transform.transform_points(points))
    implied = transform_plane(transform.inverse(), master)
    sensor_side = 1.0 if implied.d >= 0 else -1.0
    reference = float(np.mean(sensor_side * implied.signed_distances(points) > epsilon))
    return (
        float(np.mean(np.abs(signed) <= epsilon)),
        float(np.mean(signed > epsilon)),
        float(np.mean(signed >= -epsilon)),
        reference,
    )


def verify_ground_side(
    cloud: PointCloud,
    alignment: GroundAlignment,
    master: Plane,
    epsilon: float = GROUND_EPSILON_M,
) -> GroundAlignment:
    """Check the aligned slave sits on top of the master ground, flipping once if not.

    A candidate passes when some slave points lie on the master plane and the
    share of points above the ground is at least half the share lying on the
    sensor side of the slave's own ground before alignment.
    """
    if len(cloud) == 0:
        raise AmbiguousGroundError(f"cloud '{cloud.frame_id}' is empty")

    candidates = [
        (alignment.transform, False),
        (_half_turn_in_plane(master).compose(alignment.transform), True),
    ]
    for transform, corrected in candidates:
        on_plane, above, on_or_above, reference = _side_support(
            cloud.points, transform, master, epsilon
        )
        logger.debug(
            "ground side of '%s' (corrected=%s): on=%.3f above=%.3f reference=%.3f",
            cloud.frame_id,
            corrected,
            on_plane,
            above,
            reference,
        )
        if on_plane > 0 and above >= FLIP_SUPPORT_RATIO * reference:
            if corrected:
                logger.info("ground of '%s' was upside down; flipped", cloud.frame_id)
            return GroundAlignment(
                transform, alignment.flip_applied or corrected, on_or_above
            )

    raise AmbiguousGroundError(
        f"neither ground orientation of '{cloud.frame_id}' is supported by its points"
    )
