"""Point-cloud files and JSON spec/config loading."""

from src.data.loader import (
    SPECS_DIR,
    load_perturbation_spec,
    load_pipeline_config,
    load_rig_spec,
    load_scene_spec,
    pose_from_json,
    pose_to_json,
    rig_to_json,
    save_rig_spec,
)
from src.data.pcd import CloudFile, read_cloud, read_cloud_file, write_cloud


__all__ = [
    "SPECS_DIR",
    "CloudFile",
    "load_perturbation_spec",
    "load_pipeline_config",
    "load_rig_spec",
    "load_scene_spec",
    "pose_from_json",
    "pose_to_json",
    "read_cloud",
    "read_cloud_file",
    "rig_to_json",
    "save_rig_spec",
    "write_cloud",
]
