"""Synthetic road scenes, multi-LiDAR captures and perturbed initial guesses."""

from src.simulation.capture import capture, perturb, relative_extrinsics
from src.simulation.scene import generate_scene, random_layout
from src.simulation.types import (
    CaptureSet,
    PerturbationSpec,
    Primitive,
    RigSpec,
    Scene,
    SceneSpec,
    SensorSpec,
    Shape,
)


__all__ = [
    "CaptureSet",
    "PerturbationSpec",
    "Primitive",
    "RigSpec",
    "Scene",
    "SceneSpec",
    "SensorSpec",
    "Shape",
    "capture",
    "generate_scene",
    "perturb",
    "random_layout",
    "relative_extrinsics",
]
