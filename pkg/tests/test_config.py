import json
import math

import numpy as np
import pytest

from src.data import (
    SPECS_DIR,
    load_perturbation_spec,
    load_pipeline_config,
    load_rig_spec,
    load_scene_spec,
    pose_from_json,
    pose_to_json,
    save_rig_spec,
)
from src.errors import ConfigError
from src.geometry import EulerPose, euler_to_transform
from src.simulation import Shape


def test_standard_scene_loads_in_radians():
    spec = load_scene_spec()
    assert spec.ground_extent == (60.0, 60.0)
    assert spec.seed == 7
    shapes = [primitive.shape for primitive in spec.primitives]
    assert shapes.count(Shape.WALL) == 3
    assert shapes.count(Shape.CYLINDER) == 6
    assert spec.primitives[0].yaw == pytest.approx(math.pi / 2)


def test_default_rig_has_master_and_four_slaves():
    rig = load_rig_spec()
    assert rig.master.frame_id == "top"
    assert [sensor.frame_id for sensor in rig.slaves] == ["front", "back", "left", "right"]
    np.testing.assert_allclose(rig.master.pose.translation, [0.0, 0.0, 1.9])
    assert rig.max_range == 30.0


def test_pipeline_config_converts_degree_fields():
    cfg = load_pipeline_config()
    assert cfg.planar.coarse_step == pytest.approx(math.radians(2.0))
    assert cfg.octree.angle_step_init == pytest.approx(math.radians(0.5))
    assert cfg.octree.max_depth == 10
    assert cfg.icpn.normal_angle_gate == 45.0
    assert load_perturbation_spec().rotation_bound == pytest.approx(math.radians(45.0))


def test_rig_round_trips(tmp_path):
    rig = load_rig_spec()
    path = tmp_path / "rig.json"
    save_rig_spec(rig, path)
    loaded = load_rig_spec(path)
    for original, copy in zip(rig.sensors, loaded.sensors, strict=True):
        assert original.frame_id == copy.frame_id
        np.testing.assert_allclose(original.pose.as_matrix(), copy.pose.as_matrix(), atol=1e-12)


def test_missing_max_range_means_unlimited(tmp_path):
    content = json.loads((SPECS_DIR / "default_rig.json").read_text(encoding="utf-8"))
    content["max_range"] = None
    path = tmp_path / "rig.json"
    path.write_text(json.dumps(content), encoding="utf-8")
    assert math.isinf(load_rig_spec(path).max_range)


def test_pose_json_uses_degrees():
    pose = euler_to_transform(EulerPose.from_degrees(yaw=-90.0, x=0.2, y=-0.9, z=1.0))
    values = pose_to_json(pose)
    assert values["yaw"] == pytest.approx(-90.0)
    np.testing.assert_allclose(pose_from_json(values, "test").as_matrix(), pose.as_matrix(), atol=1e-12)


@pytest.mark.parametrize(
    "content",
    [
        {"rotation_bound": "45"},
        {"rotation_bound": 45.0, "extra": 1},
        {"seed": 1.5},
    ],
)
def test_bad_perturbation_files_raise(tmp_path, content):
    path = tmp_path / "perturb.json"
    path.write_text(json.dumps(content), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_perturbation_spec(path)


def test_invalid_json_reports_line(tmp_path):
    path = tmp_path / "pipeline.json"
    path.write_text('{\n  "seed": 0,\n  "run_icpn": tru\n}', encoding="utf-8")
    with pytest.raises(ConfigError, match=":3:"):
        load_pipeline_config(path)


def test_bad_rig_raises(tmp_path):
    path = tmp_path / "rig.json"
    path.write_text(json.dumps({"sensors": [{"frame_id": "top"}]}), encoding="utf-8")
    with pytest.raises(ConfigError):
        load_rig_spec(path)
