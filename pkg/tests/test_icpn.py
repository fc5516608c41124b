import math

import numpy as np
import pytest

from src.errors import CorrespondenceStarvationError, InvalidArgumentError
from src.geometry import (
    EulerPose,
    PointCloud,
    RigidTransform,
    euler_to_transform,
    rotation_from_vector,
    translation,
)
from src.refinement import IcpnConfig, icpn_refine, point_to_plane_system
from src.spatial import build_index, estimate_normals
from tests.helpers import corner_room, rotation_error_deg


def _slave_view(room: PointCloud, truth: RigidTransform) -> PointCloud:
    """The room as seen by a slave whose slave → master pose is ``truth``."""
    return PointCloud(truth.inverse().transform_points(room.points), "slave")


def test_identical_clouds_need_no_increment():
    room = corner_room()
    result = icpn_refine(estimate_normals(room), room, RigidTransform.identity())
    np.testing.assert_allclose(result.transform.as_matrix(), np.eye(4), atol=1e-9)
    assert result.final_cost == pytest.approx(0.0, abs=1e-18)
    assert result.converged
    assert result.iterations_used <= 2


def test_recovers_small_known_transform():
    room = corner_room()
    truth = euler_to_transform(EulerPose.from_degrees(pitch=1.0, roll=-1.0, yaw=2.0, x=0.05, y=-0.03, z=0.02))
    result = icpn_refine(estimate_normals(room), _slave_view(room, truth), RigidTransform.identity())
    assert rotation_error_deg(result.transform.rotation, truth.rotation) < 0.1
    np.testing.assert_allclose(result.transform.translation, truth.translation, atol=0.005)
    assert result.final_cost < 1e-8


def test_recovers_from_basin_edge_with_wider_gate():
    room = corner_room()
    truth = euler_to_transform(EulerPose.from_degrees(pitch=3.0, roll=-2.0, yaw=6.0, x=0.2, y=-0.15, z=0.1))
    cfg = IcpnConfig(max_correspondence_dist=1.0)
    result = icpn_refine(estimate_normals(room), _slave_view(room, truth), RigidTransform.identity(), cfg)
    assert rotation_error_deg(result.transform.rotation, truth.rotation) < 0.1
    np.testing.assert_allclose(result.transform.translation, truth.translation, atol=0.005)


def test_increment_composes_onto_initial_pose():
    room = corner_room()
    truth = euler_to_transform(EulerPose.from_degrees(yaw=1.5, x=0.04))
    initial = euler_to_transform(EulerPose.from_degrees(yaw=0.5, x=0.01))
    result = icpn_refine(estimate_normals(room), _slave_view(room, truth), initial)
    final = result.transform.compose(initial)
    assert rotation_error_deg(final.rotation, truth.rotation) < 0.1
    np.testing.assert_allclose(final.translation, truth.translation, atol=0.005)


def test_accepted_costs_never_increase():
    room = corner_room()
    master = estimate_normals(room)
    rng = np.random.default_rng(7)
    for _ in range(20):
        angles = np.radians(rng.uniform(-3.0, 3.0, size=3))
        shifts = rng.uniform(-0.1, 0.1, size=3)
        truth = euler_to_transform(EulerPose(*angles, *shifts))
        result = icpn_refine(master, _slave_view(room, truth), RigidTransform.identity())
        history = np.array(result.cost_history)
        assert np.all(np.diff(history) <= 0.0)
        assert result.final_cost == history[-1]
        assert result.final_cost <= history[0]
        assert result.iterations_used <= IcpnConfig().max_iterations


def test_disjoint_start_starves():
    room = corner_room()
    with pytest.raises(CorrespondenceStarvationError):
        icpn_refine(estimate_normals(room), room, translation([100.0, 0.0, 0.0]))


def test_invalid_config_is_rejected():
    room = corner_room()
    with pytest.raises(InvalidArgumentError):
        icpn_refine(estimate_normals(room), room, RigidTransform.identity(), IcpnConfig(max_iterations=0))


def test_linearised_cost_change_matches_finite_difference():
    room = corner_room()
    master = estimate_normals(room)
    index = build_index(room)
    cfg = IcpnConfig()

    x, y, z = room.points.T
    on_x_wall = np.isclose(x, -3.0)
    on_y_wall = np.isclose(y, -3.0)
    on_floor = np.isclose(z, -1.0)
    interior = (
        (on_x_wall | ((x > -2.0) & (x < 2.5)))
        & (on_y_wall | ((y > -2.0) & (y < 2.5)))
        & (on_floor | ((z > 0.0) & (z < 4.5)))
    )
    slave = room.points[interior]
    slave_normals = master.normals[interior]

    base = euler_to_transform(EulerPose.from_degrees(yaw=0.5, pitch=-0.3, x=0.02, z=0.03))

    def system_at(pose: RigidTransform):
        return point_to_plane_system(
            master, index, pose.transform_points(slave), slave_normals @ pose.rotation.T, cfg
        )

    start = system_at(base)
    assert start.correspondence_count == len(slave)

    rng = np.random.default_rng(8)
    for _ in range(10):
        delta = rng.uniform(-0.01, 0.01, size=6)
        step = RigidTransform(rotation_from_vector(delta[:3]).rotation, delta[3:])
        moved = system_at(step.compose(base))
        assert moved.correspondence_count == len(slave)

        predicted = np.mean((start.residuals + start.jacobian @ delta) ** 2) - start.cost
        actual = moved.cost - start.cost
        assert abs(actual - predicted) <= 0.1 * abs(actual)
        assert not math.isclose(actual, 0.0)
