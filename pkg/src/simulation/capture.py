"""Per-sensor captures of a scene and perturbed initial guesses."""

import logging
import math

import numpy as np

from src.constants import EULER_AXES, ROTATION_AXES, SPARSE_CAPTURE_POINTS
from src.errors import InvalidArgumentError
from src.geometry import EulerPose, PointCloud, RigidTransform, euler_to_transform
from src.simulation.types import CaptureSet, PerturbationSpec, RigSpec, Scene


logger = logging.getLogger(__name__)


def capture(scene: Scene, rig: RigSpec) -> CaptureSet:
    """Express the scene points each sensor can see in that sensor's frame.

    A point is visible when it lies within ``max_range`` and, for a field of
    view below 360°, within half the field of view of the sensor x-axis.
    """
    rng = np.random.default_rng(rig.seed)
    clouds: dict[str, PointCloud] = {}
    labels = {}
    sparse = []

    for sensor in rig.sensors:
        local = sensor.pose.inverse().transform_points(scene.cloud.points)
        ranges = np.linalg.norm(local, axis=1)
        visible = ranges <= rig.max_range
        if rig.fov < 360.0:
            azimuth = np.arctan2(local[:, 1], local[:, 0])
            visible &= np.abs(azimuth) <= math.radians(rig.fov) / 2.0
        local, ranges = local[visible], ranges[visible]

        if rig.noise_sigma > 0:
            noise = rng.normal(0.0, rig.noise_sigma, size=len(local))
            scale = np.divide(noise, ranges, out=np.zeros_like(noise), where=ranges > 0)
            local = local * (1.0 + scale)[:, None]

        clouds[sensor.frame_id] = PointCloud(local, sensor.frame_id)
        labels[sensor.frame_id] = scene.labels[visible]
        if len(local) < SPARSE_CAPTURE_POINTS:
            sparse.append(sensor.frame_id)
            logger.warning(
                "sensor '%s' sees only %d points (< %d)",
                sensor.frame_id,
                len(local),
                SPARSE_CAPTURE_POINTS,
            )

    return CaptureSet(clouds, labels, tuple(sparse))


def perturb(
    gt: RigidTransform,
    spec: PerturbationSpec,
    rng: np.random.Generator | None = None,
) -> tuple[RigidTransform, EulerPose]:
    """Draw a uniform per-axis deviation and compose it onto ``gt`` in the sensor frame."""
    if spec.rotation_bound < 0 or spec.translation_bound < 0:
        raise InvalidArgumentError("perturbation bounds must be non-negative")
    if rng is None:
        rng = np.random.default_rng(spec.seed)
    bounds = np.array(
        [spec.rotation_bound if axis in ROTATION_AXES else spec.translation_bound for axis in EULER_AXES]
    )
    deviation = EulerPose(*(float(value) for value in rng.uniform(-bounds, bounds)))
    return gt.compose(euler_to_transform(deviation)), deviation


def relative_extrinsics(rig: RigSpec) -> dict[str, RigidTransform]:
    """Ground-truth slave → master transform for every slave."""
    to_master = rig.master.pose.inverse()
    return {sensor.frame_id: to_master.compose(sensor.pose) for sensor in rig.slaves}
