"""Two-stage multi-LiDAR extrinsic calibration with a synthetic road-scene generator."""

from src.data import load_pipeline_config, load_rig_spec, load_scene_spec, read_cloud, write_cloud
from src.geometry import EulerPose, PointCloud, RigidTransform
from src.output import load_report, write_report
from src.pipeline import (
    CalibrationReport,
    PipelineConfig,
    TrialOutcome,
    calibrate_pair,
    prepare_master,
    run_experiment,
)
from src.simulation import capture, generate_scene, perturb, relative_extrinsics


__version__ = "0.1.0"

__all__ = [
    "CalibrationReport",
    "EulerPose",
    "PipelineConfig",
    "PointCloud",
    "RigidTransform",
    "TrialOutcome",
    "calibrate_pair",
    "capture",
    "generate_scene",
    "load_pipeline_config",
    "load_report",
    "load_rig_spec",
    "load_scene_spec",
    "perturb",
    "prepare_master",
    "read_cloud",
    "relative_extrinsics",
    "run_experiment",
    "write_cloud",
    "write_report",
]
