"""Two-stage slave → master calibration of one LiDAR pair.

Use calibrate_pair() as the entry point. Stage 1 aligns the ground planes
(pitch, roll, z) and searches yaw, x and y; stage 2 polishes the pose with
point-to-plane ICP and the octree volume scan. All stages run in a working
frame whose origin is the slave mount of the initial guess.
"""

import logging
import math
import time
from collections.abc import Callable, Iterator
from contextlib import contextmanager

import numpy as np

from src.constants import SUCCESS_ROTATION_DEG, SUCCESS_TRANSLATION_M
from src.errors import (
    CalibrationError,
    CalibrationStage,
    DegenerateDecompositionError,
    DegenerateSceneError,
    FailureReason,
    NoOverlapError,
)
from src.geometry import EulerPose, PointCloud, RigidTransform, transform_to_euler, translation
from src.ground import align_ground, fit_ground_plane, transform_plane, verify_ground_side
from src.pipeline.types import (
    MasterModel,
    PairCalibration,
    PipelineConfig,
    StageRecord,
    TraceStage,
    TrialOutcome,
)
from src.planar import remove_ground, search_planar
from src.refinement import icpn_refine, octree_refine
from src.spatial import NeighborIndex, build_index, estimate_normals, voxel_downsample


logger = logging.getLogger(__name__)


@contextmanager
def _stage(stage: CalibrationStage) -> Iterator[None]:
    try:
        yield
    except CalibrationError as error:
        if error.stage is None:
            error.stage = stage
        raise


def prepare_master(master: PointCloud, cfg: PipelineConfig | None = None) -> MasterModel:
    """Ground plane, normals and the ground-free downsample of the master cloud."""
    if cfg is None:
        cfg = PipelineConfig()
    with _stage(CalibrationStage.GROUND):
        plane = fit_ground_plane(
            master, cfg.ground_epsilon, cfg.ransac_iterations, seed=cfg.seed
        )

    non_ground, reason = None, ""
    try:
        non_ground = voxel_downsample(
            remove_ground(master, plane, cfg.ground_epsilon),
            cfg.planar.downsample_voxel,
        )
    except DegenerateSceneError as error:
        reason = str(error)
        logger.warning("master '%s': %s", master.frame_id, reason)

    return MasterModel(
        cloud=master,
        index=build_index(master),
        plane=plane,
        oriented=estimate_normals(master, k=cfg.icpn.normal_k),
        non_ground=non_ground,
        degenerate_reason=reason,
    )


def alignment_cost(
    master: NeighborIndex,
    slave: PointCloud,
    pose: RigidTransform,
    gate: float,
) -> float:
    """Mean over slave points of the squared NN distance, each capped at ``gate²``."""
    distances, _ = master.query(
        pose.transform_points(slave.points), k=1, distance_upper_bound=gate
    )
    return float(np.mean(np.minimum(distances, gate) ** 2))


def overlap_fraction(
    master: NeighborIndex,
    slave: PointCloud,
    pose: RigidTransform,
    distance: float,
) -> float:
    distances, _ = master.query(
        pose.transform_points(slave.points), k=1, distance_upper_bound=distance
    )
    return float(np.mean(np.isfinite(distances)))


def calibrate_pair(
    master: PointCloud,
    slave: PointCloud,
    cfg: PipelineConfig | None = None,
    initial: RigidTransform | None = None,
    model: MasterModel | None = None,
) -> PairCalibration:
    """Estimate the slave → master transform, recording the pose after every stage.

    Raises a CalibrationError whose ``stage`` names the step that failed.
    """
    if cfg is None:
        cfg = PipelineConfig()
    if initial is None:
        initial = RigidTransform.identity()
    if model is None:
        model = prepare_master(master, cfg)

    mount = initial.translation
    to_work, from_work = translation(-mount), translation(mount)
    trace: list[StageRecord] = []
    clock = time.perf_counter()

    def record(stage: TraceStage, pose_w: RigidTransform, accepted: bool = True) -> float:
        nonlocal clock
        now = time.perf_counter()
        pose = from_work.compose(pose_w)
        cost = alignment_cost(model.index, slave, pose, cfg.alignment_cost_gate)
        trace.append(StageRecord(stage, pose, cost, accepted, (now - clock) * 1e3))
        clock = now
        logger.debug("'%s' %s: cost %.6f (accepted=%s)", slave.frame_id, stage, cost, accepted)
        return cost

    def refine(
        stage: TraceStage,
        pose_w: RigidTransform,
        cost: float,
        step: Callable[[], RigidTransform],
    ) -> tuple[RigidTransform, float]:
        candidate = step()
        candidate_cost = alignment_cost(
            model.index, slave, from_work.compose(candidate), cfg.alignment_cost_gate
        )
        if candidate_cost <= cost:
            return candidate, record(stage, candidate)
        logger.warning(
            "'%s' %s raised the alignment cost (%.6f -> %.6f); keeping the previous pose",
            slave.frame_id,
            stage,
            cost,
            candidate_cost,
        )
        record(stage, pose_w, accepted=False)
        return pose_w, cost

    start_w = to_work.compose(initial)
    record(TraceStage.INITIAL, start_w)

    with _stage(CalibrationStage.GROUND):
        slave_plane = fit_ground_plane(
            slave, cfg.ground_epsilon, cfg.ransac_iterations, seed=cfg.seed
        )
        master_plane_w = transform_plane(to_work, model.plane)
        slave_plane_w = transform_plane(start_w, slave_plane)
        slave_w = PointCloud(start_w.transform_points(slave.points), slave.frame_id)
        alignment = verify_ground_side(
            slave_w,
            align_ground(master_plane_w, slave_plane_w),
            master_plane_w,
            cfg.ground_epsilon,
        )
    ground_w = alignment.transform.compose(start_w)
    record(TraceStage.GROUND, ground_w)

    with _stage(CalibrationStage.PLANAR_SEARCH):
        if model.non_ground is None:
            raise DegenerateSceneError(model.degenerate_reason)
        aligned = slave_w.with_points(alignment.transform.transform_points(slave_w.points))
        slave_ng = voxel_downsample(
            remove_ground(
                aligned,
                transform_plane(alignment.transform, slave_plane_w),
                cfg.ground_epsilon,
            ),
            cfg.planar.downsample_voxel,
        )
        master_ng_w = model.non_ground.with_points(model.non_ground.points - mount)
        estimate = search_planar(master_ng_w, slave_ng, cfg.planar)
        if estimate.low_confidence and cfg.reject_low_confidence:
            raise DegenerateSceneError(
                f"yaw of '{slave.frame_id}' is unobservable: the cost has no distinct minimum"
            )
    pose_w = estimate.as_transform().compose(ground_w)
    cost = record(TraceStage.ROUGH, pose_w)

    if cfg.run_icpn:
        with _stage(CalibrationStage.ICPN):
            master_oriented_w = model.oriented.shifted(-mount)

            def icpn_step() -> RigidTransform:
                result = icpn_refine(master_oriented_w, slave, pose_w, cfg.icpn)
                return result.transform.compose(pose_w)

            pose_w, cost = refine(TraceStage.ICPN, pose_w, cost, icpn_step)

    if cfg.run_octree:
        with _stage(CalibrationStage.OCTREE):
            master_w = model.cloud.with_points(model.cloud.points - mount)
            current_w = pose_w
            pose_w, cost = refine(
                TraceStage.OCTREE,
                pose_w,
                cost,
                lambda: octree_refine(master_w, slave, current_w, cfg.octree),
            )

    final = from_work.compose(pose_w)
    with _stage(CalibrationStage.VERIFICATION):
        overlap = overlap_fraction(model.index, slave, final, cfg.overlap_distance)
        if overlap < cfg.min_overlap_fraction:
            raise NoOverlapError(
                f"only {overlap:.1%} of '{slave.frame_id}' lies within "
                f"{cfg.overlap_distance} m of the master after calibration"
            )

    logger.info(
        "'%s' calibrated: rough cost %.5f -> final cost %.5f (overlap %.1f%%)",
        slave.frame_id,
        trace[2].cost,
        cost,
        overlap * 100,
    )
    return PairCalibration(final, tuple(trace))


def pose_errors(estimate: RigidTransform, truth: RigidTransform) -> EulerPose:
    """Per-axis residual ``euler(estimate ∘ truth⁻¹)``."""
    return transform_to_euler(estimate.compose(truth.inverse()))


def is_accurate(errors: EulerPose) -> bool:
    rotation = max(abs(errors.pitch), abs(errors.roll), abs(errors.yaw))
    shift = max(abs(errors.x), abs(errors.y), abs(errors.z))
    return rotation < math.radians(SUCCESS_ROTATION_DEG) and shift < SUCCESS_TRANSLATION_M


def score(outcome: TrialOutcome, estimate: RigidTransform, truth: RigidTransform) -> TrialOutcome:
    """Fill in errors against ground truth; a completed but inaccurate run fails."""
    try:
        errors = pose_errors(estimate, truth)
    except DegenerateDecompositionError as error:
        return outcome._replace(
            success=False,
            failure_reason=FailureReason.INACCURATE,
            failed_stage=CalibrationStage.VERIFICATION,
            message=str(error),
        )
    if is_accurate(errors):
        return outcome._replace(errors=errors)
    return outcome._replace(
        success=False,
        failure_reason=FailureReason.INACCURATE,
        failed_stage=CalibrationStage.VERIFICATION,
        message="per-axis error exceeds the success thresholds",
        errors=errors,
    )


def calibrate_slave(
    model: MasterModel,
    slave: PointCloud,
    cfg: PipelineConfig,
    initial: RigidTransform | None = None,
    truth: RigidTransform | None = None,
    trial: int = 0,
    deviation: EulerPose | None = None,
) -> TrialOutcome:
    """Run calibrate_pair and fold any CalibrationError into a TrialOutcome."""
    try:
        result = calibrate_pair(model.cloud, slave, cfg, initial, model)
    except CalibrationError as error:
        logger.warning(
            "'%s' failed at %s: %s (%s)", slave.frame_id, error.stage, error.reason, error
        )
        return failed_outcome(error, slave.frame_id, trial, deviation)

    try:
        estimate = transform_to_euler(result.transform)
    except DegenerateDecompositionError as error:
        logger.warning("'%s' estimate has no Euler form: %s", slave.frame_id, error)
        return TrialOutcome(
            trial=trial,
            slave_id=slave.frame_id,
            success=False,
            failure_reason=FailureReason.INACCURATE,
            failed_stage=CalibrationStage.VERIFICATION,
            message=str(error),
            deviation=deviation,
            trace=result.trace,
        )

    outcome = TrialOutcome(
        trial=trial,
        slave_id=slave.frame_id,
        success=True,
        estimate=estimate,
        deviation=deviation,
        trace=result.trace,
    )
    if truth is None:
        return outcome
    return score(outcome, result.transform, truth)


def failed_outcome(
    error: CalibrationError,
    slave_id: str,
    trial: int = 0,
    deviation: EulerPose | None = None,
) -> TrialOutcome:
    return TrialOutcome(
        trial=trial,
        slave_id=slave_id,
        success=False,
        failure_reason=error.reason,
        failed_stage=error.stage,
        message=str(error),
        deviation=deviation,
    )
