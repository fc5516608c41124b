"""ICP with normals (point-to-plane) refinement.

Use icpn_refine() as the entry point. The objective is the truncated
point-to-plane cost: the mean over all slave points of min(r², τ²), where r is
the distance to the tangent plane of the matched master point and τ the
correspondence gate. Unmatched points contribute τ².
"""

import logging
import math

import numpy as np
from numpy.typing import NDArray

from src.constants import ICPN_STEP_HALVINGS, MIN_ICPN_CORRESPONDENCES
from src.errors import CorrespondenceStarvationError, InvalidArgumentError
from src.geometry import PointCloud, RigidTransform, rotation_from_vector
from src.refinement.types import IcpnConfig, IcpnResult, PointToPlaneSystem
from src.spatial import NeighborIndex, OrientedCloud, build_index, estimate_normals


logger = logging.getLogger(__name__)


def point_to_plane_system(
    master: OrientedCloud,
    master_index: NeighborIndex,
    points: NDArray,
    normals: NDArray,
    cfg: IcpnConfig,
) -> PointToPlaneSystem:
    """Gate nearest-neighbour matches and linearise their point-to-plane residuals.

    ``points`` and ``normals`` are slave points and normals already expressed
    in the master frame.
    """
    gate = cfg.max_correspondence_dist
    distances, ids = master_index.query(points, k=1, distance_upper_bound=gate)
    matched = np.flatnonzero(np.isfinite(distances))
    target_normals = master.normals[ids[matched]]
    agreement = np.einsum("ij,ij->i", target_normals, normals[matched])
    matched = matched[agreement >= math.cos(math.radians(cfg.normal_angle_gate))]

    x = points[matched]
    n = master.normals[ids[matched]]
    residuals = np.einsum("ij,ij->i", n, x - master.positions[ids[matched]])
    truncated = np.minimum(residuals**2, gate**2).sum()
    unmatched = len(points) - len(matched)
    cost = float((truncated + unmatched * gate**2) / len(points))
    jacobian = np.hstack([np.cross(x, n), n])
    return PointToPlaneSystem(jacobian, residuals, cost, len(matched))


def _increment(delta: NDArray) -> RigidTransform:
    return RigidTransform(rotation_from_vector(delta[:3]).rotation, delta[3:])


def icpn_refine(
    master: OrientedCloud,
    slave: PointCloud,
    initial: RigidTransform,
    cfg: IcpnConfig | None = None,
) -> IcpnResult:
    """Polish ``initial`` (slave → master) with point-to-plane Gauss-Newton steps.

    Only steps that do not raise the cost are accepted; a rejected step is
    halved up to three times before the loop gives up.
    """
    if cfg is None:
        cfg = IcpnConfig()
    if cfg.max_iterations < 1 or cfg.max_correspondence_dist <= 0:
        raise InvalidArgumentError("max_iterations and the distance gate must be positive")
    if cfg.normal_angle_gate <= 0:
        raise InvalidArgumentError("normal angle gate must be positive")

    master_index = build_index(PointCloud(master.positions, master.frame_id))
    slave_normals = estimate_normals(slave, k=cfg.normal_k).normals

    def system_at(increment: RigidTransform) -> PointToPlaneSystem:
        pose = increment.compose(initial)
        return point_to_plane_system(
            master,
            master_index,
            pose.transform_points(slave.points),
            slave_normals @ pose.rotation.T,
            cfg,
        )

    increment = RigidTransform.identity()
    system = system_at(increment)
    if system.correspondence_count < MIN_ICPN_CORRESPONDENCES:
        raise CorrespondenceStarvationError(
            f"'{slave.frame_id}' has {system.correspondence_count} admissible "
            f"correspondences at the initial pose (need {MIN_ICPN_CORRESPONDENCES})"
        )

    history = [system.cost]
    converged = False
    iterations = 0
    for iterations in range(1, cfg.max_iterations + 1):
        delta, *_ = np.linalg.lstsq(system.jacobian, -system.residuals, rcond=None)

        accepted = None
        for _ in range(ICPN_STEP_HALVINGS + 1):
            candidate = _increment(delta).compose(increment)
            candidate_system = system_at(candidate)
            if (
                candidate_system.correspondence_count >= MIN_ICPN_CORRESPONDENCES
                and candidate_system.cost <= system.cost
            ):
                accepted = (candidate, candidate_system)
                break
            delta = delta / 2.0

        if accepted is None:
            logger.debug(
                "icpn on '%s' stopped at iteration %d: no descent step",
                slave.frame_id,
                iterations,
            )
            break

        increment, system = accepted
        history.append(system.cost)
        if (
            np.linalg.norm(delta[:3]) < cfg.convergence_rotation
            and np.linalg.norm(delta[3:]) < cfg.convergence_translation
        ):
            converged = True
            break

    logger.debug(
        "icpn on '%s': cost %.6f -> %.6f in %d iterations (converged=%s)",
        slave.frame_id,
        history[0],
        system.cost,
        iterations,
        converged,
    )
    return IcpnResult(increment, iterations, system.cost, converged, tuple(history))
