import logging
import math

import numpy as np
import pytest

from src.errors import InvalidArgumentError
from src.geometry import EulerPose, RigidTransform, euler_to_transform, transform_to_euler, translation
from src.simulation import (
    PerturbationSpec,
    Primitive,
    RigSpec,
    SceneSpec,
    SensorSpec,
    Shape,
    capture,
    generate_scene,
    perturb,
    random_layout,
    relative_extrinsics,
)


def _rig(*sensors: SensorSpec, **kwargs) -> RigSpec:
    return RigSpec((SensorSpec("top", RigidTransform.identity()), *sensors), **kwargs)


def test_ground_only_scene_has_expected_count():
    spec = SceneSpec(ground_extent=(40.0, 40.0), ground_density=10.0, allow_degenerate=True)
    scene = generate_scene(spec)
    assert len(scene) == 16000
    assert np.all(scene.cloud.points[:, 2] == 0.0)
    assert np.all(np.abs(scene.cloud.points[:, :2]) <= 20.0)
    assert np.all(scene.labels == 0)


def test_wall_density_and_labels():
    wall = Primitive(Shape.WALL, (5.0, 3.0), math.radians(30), (10.0, 2.0))
    spec = SceneSpec(ground_extent=(1.0, 1.0), ground_density=1.0, primitives=(wall,), primitive_density=10.0)
    scene = generate_scene(spec)
    on_wall = scene.labels == 1
    assert np.count_nonzero(on_wall) == 200
    points = scene.cloud.points[on_wall]
    assert points[:, 2].min() >= 0.0
    assert points[:, 2].max() <= 2.0
    # all wall samples lie on the vertical plane through the centre
    normal = np.array([-math.sin(math.radians(30)), math.cos(math.radians(30)), 0.0])
    np.testing.assert_allclose((points - [5.0, 3.0, 0.0]) @ normal, 0.0, atol=1e-9)


def test_box_and_cylinder_counts():
    box = Primitive(Shape.BOX, (0.0, 0.0), 0.0, (4.0, 2.0, 1.0))
    pole = Primitive(Shape.CYLINDER, (10.0, 0.0), 0.0, (0.5, 2.0), density=50.0)
    scene = generate_scene(SceneSpec(ground_extent=(2.0, 2.0), primitives=(box, pole)))
    # top 8 + two 2 m² ends + two 4 m² sides = 20 m² at 20 pts/m²
    assert np.count_nonzero(scene.labels == 1) == 400
    assert np.count_nonzero(scene.labels == 2) == round(2 * math.pi * 0.5 * 2.0 * 50.0)
    radii = np.linalg.norm(scene.cloud.points[scene.labels == 2][:, :2] - [10.0, 0.0], axis=1)
    np.testing.assert_allclose(radii, 0.5)


def test_scene_is_deterministic_per_seed(scene_spec):
    first, second = generate_scene(scene_spec), generate_scene(scene_spec)
    np.testing.assert_array_equal(first.cloud.points, second.cloud.points)
    other = generate_scene(scene_spec._replace(seed=scene_spec.seed + 1))
    assert not np.array_equal(first.cloud.points, other.cloud.points)


def test_invalid_scenes_are_rejected():
    wall = Primitive(Shape.WALL, (0.0, 0.0), 0.0, (1.0, 1.0))
    with pytest.raises(InvalidArgumentError):
        generate_scene(SceneSpec(ground_density=0.0, primitives=(wall,)))
    with pytest.raises(InvalidArgumentError):
        generate_scene(SceneSpec())
    with pytest.raises(InvalidArgumentError):
        generate_scene(SceneSpec(primitives=(Primitive(Shape.BOX, (0.0, 0.0), 0.0, (1.0, 1.0)),)))


def test_identity_sensor_captures_world_frame():
    scene = generate_scene(SceneSpec(ground_extent=(10.0, 10.0), ground_density=5.0, allow_degenerate=True))
    rig = _rig(SensorSpec("front", translation([0.0, 0.0, 2.0])))
    captures = capture(scene, rig)
    np.testing.assert_array_equal(captures.cloud("top").points, scene.cloud.points)
    np.testing.assert_allclose(captures.cloud("front").points, scene.cloud.points - [0.0, 0.0, 2.0])
    assert captures.label_counts("top") == {0: len(scene)}


def test_capture_round_trips_through_the_sensor_pose():
    scene = generate_scene(SceneSpec(ground_extent=(10.0, 10.0), ground_density=5.0, allow_degenerate=True))
    pose = euler_to_transform(EulerPose.from_degrees(pitch=3.0, yaw=120.0, x=1.0, y=-0.5, z=1.2))
    captures = capture(scene, _rig(SensorSpec("left", pose)))
    np.testing.assert_allclose(pose.transform_points(captures.cloud("left").points), scene.cloud.points, atol=1e-9)


def test_range_and_fov_filters():
    scene = generate_scene(SceneSpec(ground_extent=(20.0, 20.0), ground_density=5.0, allow_degenerate=True))
    captures = capture(scene, _rig(SensorSpec("front", RigidTransform.identity()), max_range=5.0, fov=90.0))
    points = captures.cloud("front").points
    assert np.all(np.linalg.norm(points, axis=1) <= 5.0)
    assert np.all(np.abs(np.arctan2(points[:, 1], points[:, 0])) <= math.radians(45.0))
    assert 0 < len(points) < len(scene)

    wide = capture(scene, _rig(SensorSpec("front", RigidTransform.identity()), max_range=5.0))
    assert len(points) < 0.5 * len(wide.cloud("front"))


def test_sparse_capture_warns(caplog):
    scene = generate_scene(SceneSpec(ground_extent=(20.0, 20.0), ground_density=5.0, allow_degenerate=True))
    far = translation([500.0, 0.0, 0.0])
    with caplog.at_level(logging.WARNING):
        captures = capture(scene, _rig(SensorSpec("far", far), max_range=30.0))
    assert captures.sparse == ("far",)
    assert len(captures.cloud("far")) == 0
    assert "far" in caplog.text


def test_rig_validation():
    with pytest.raises(InvalidArgumentError):
        RigSpec((SensorSpec("top", RigidTransform.identity()),))
    with pytest.raises(InvalidArgumentError):
        _rig(SensorSpec("top", RigidTransform.identity()))
    with pytest.raises(InvalidArgumentError):
        RigSpec((SensorSpec("front", RigidTransform.identity()), SensorSpec("back", RigidTransform.identity())))


def test_relative_extrinsics_is_master_inverse_times_slave():
    master = translation([0.0, 0.0, 1.9])
    slave = euler_to_transform(EulerPose.from_degrees(yaw=180.0, x=-2.0, z=0.9))
    rig = RigSpec((SensorSpec("top", master), SensorSpec("back", slave)))
    relative = relative_extrinsics(rig)["back"]
    np.testing.assert_allclose(relative.as_matrix(), master.inverse().compose(slave).as_matrix())
    np.testing.assert_allclose(relative.translation, [-2.0, 0.0, -1.0], atol=1e-12)


def test_zero_perturbation_returns_ground_truth():
    gt = euler_to_transform(EulerPose.from_degrees(yaw=90.0, x=0.2, y=0.9))
    guess, deviation = perturb(gt, PerturbationSpec(rotation_bound=0.0, translation_bound=0.0))
    np.testing.assert_allclose(guess.as_matrix(), gt.as_matrix())
    assert deviation == EulerPose()


def test_perturbation_is_uniform_within_bounds():
    spec = PerturbationSpec(rotation_bound=math.radians(45.0), translation_bound=0.1)
    rng = np.random.default_rng(0)
    draws = np.array([perturb(RigidTransform.identity(), spec, rng)[1] for _ in range(1000)])
    rotations, translations = draws[:, :3], draws[:, 3:]
    assert np.all(np.abs(rotations) <= spec.rotation_bound)
    assert np.all(np.abs(translations) <= spec.translation_bound)
    # uniform on [-b, b]: mean 0, std b / sqrt(3)
    assert np.abs(rotations.mean(axis=0)).max() < 0.1 * spec.rotation_bound
    np.testing.assert_allclose(rotations.std(axis=0), spec.rotation_bound / math.sqrt(3), rtol=0.1)
    np.testing.assert_allclose(translations.std(axis=0), spec.translation_bound / math.sqrt(3), rtol=0.1)


def test_perturbation_composes_in_sensor_frame():
    gt = euler_to_transform(EulerPose.from_degrees(yaw=-90.0, x=0.2, y=-0.9, z=1.0))
    guess, deviation = perturb(gt, PerturbationSpec(seed=5))
    offset = transform_to_euler(gt.inverse().compose(guess))
    np.testing.assert_allclose(offset, deviation, atol=1e-9)


def test_perturbation_is_deterministic_per_seed():
    spec = PerturbationSpec(seed=11)
    first = perturb(RigidTransform.identity(), spec)[1]
    assert perturb(RigidTransform.identity(), spec)[1] == first
    assert perturb(RigidTransform.identity(), spec._replace(seed=12))[1] != first


def test_random_layout_is_seeded_and_keeps_the_ground():
    base = SceneSpec(ground_extent=(50.0, 40.0), noise_sigma=0.01, seed=99)
    layout = random_layout(base, 3)
    assert layout == random_layout(base, 3)
    assert layout.primitives != random_layout(base, 4).primitives
    assert layout.seed == 3
    assert layout.ground_extent == base.ground_extent
    assert layout.noise_sigma == base.noise_sigma
    shapes = [primitive.shape for primitive in layout.primitives]
    assert shapes.count(Shape.WALL) == 3
    assert shapes.count(Shape.BOX) == 4
    assert shapes.count(Shape.CYLINDER) == 6
    assert len(generate_scene(layout)) > len(generate_scene(base._replace(allow_degenerate=True)))


@pytest.mark.parametrize("seed", range(10))
def test_random_walls_never_cross_the_rig(seed):
    for wall in random_layout(SceneSpec(), seed).primitives:
        if wall.shape is not Shape.WALL:
            continue
        direction = np.array([math.cos(wall.yaw), math.sin(wall.yaw)])
        center = np.array(wall.center)
        # distance from the origin to the wall's supporting line
        assert abs(center[0] * direction[1] - center[1] * direction[0]) > 8.6


def test_random_layout_rejects_empty_counts():
    with pytest.raises(InvalidArgumentError):
        random_layout(SceneSpec(), 0, walls=0, boxes=0, poles=0)
    with pytest.raises(InvalidArgumentError):
        random_layout(SceneSpec(), 0, walls=-1)
