"""Calibration report export and import."""

from src.output.exporter import (
    aggregate,
    errors_frame,
    estimates_frame,
    load_report,
    pose_from_dict,
    pose_to_dict,
    report_to_dict,
    scene_means_frame,
    sweep_to_dict,
    write_report,
    write_sweep,
)


__all__ = [
    "aggregate",
    "errors_frame",
    "estimates_frame",
    "load_report",
    "pose_from_dict",
    "pose_to_dict",
    "report_to_dict",
    "scene_means_frame",
    "sweep_to_dict",
    "write_report",
    "write_sweep",
]
