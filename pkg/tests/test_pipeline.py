import math

import numpy as np
import pytest

from src.cli import display_stage_trace
from src.constants import EULER_AXES, ROTATION_AXES
from src.errors import CalibrationStage, FailureReason, InvalidArgumentError
from src.geometry import EulerPose, RigidTransform, euler_to_transform
from src.output import errors_frame, report_to_dict
from src.pipeline import (
    CalibrationReport,
    PairCalibration,
    StageRecord,
    TraceStage,
    TrialOutcome,
    alignment_cost,
    calibrate_pair,
    calibrate_slave,
    is_accurate,
    overlap_fraction,
    pose_errors,
    prepare_master,
    run_experiment,
    run_scene_sweep,
    score,
    trial_rng,
)
from src.simulation import PerturbationSpec, SceneSpec, capture, generate_scene, random_layout, relative_extrinsics
from src.spatial import build_index
from tests.helpers import corner_room, rotation_error_deg


def _max_errors(errors: EulerPose) -> tuple[float, float]:
    rotation = max(abs(errors.pitch), abs(errors.roll), abs(errors.yaw))
    return math.degrees(rotation), max(abs(errors.x), abs(errors.y), abs(errors.z))


def test_alignment_cost_and_overlap_of_identical_clouds():
    room = corner_room()
    index = build_index(room)
    assert alignment_cost(index, room, RigidTransform.identity(), 1.0) == 0.0
    assert overlap_fraction(index, room, RigidTransform.identity(), 0.15) == 1.0
    far = euler_to_transform(EulerPose(x=50.0))
    assert alignment_cost(index, room, far, 1.0) == pytest.approx(1.0)
    assert overlap_fraction(index, room, far, 0.15) == 0.0


def test_pose_errors_are_zero_at_truth_and_signed_off_it():
    truth = euler_to_transform(EulerPose.from_degrees(yaw=90.0, x=0.2, y=0.9, z=-0.9))
    np.testing.assert_allclose(pose_errors(truth, truth), np.zeros(6), atol=1e-12)

    nudge = euler_to_transform(EulerPose.from_degrees(yaw=0.3, z=0.02))
    errors = pose_errors(nudge.compose(truth), truth)
    assert math.degrees(errors.yaw) == pytest.approx(0.3)
    assert errors.z == pytest.approx(0.02)
    assert is_accurate(errors)
    assert not is_accurate(errors._replace(x=0.06))
    assert not is_accurate(errors._replace(roll=math.radians(0.6)))


def test_score_marks_completed_but_inaccurate_runs_as_failures():
    truth = RigidTransform.identity()
    outcome = TrialOutcome(0, "front", True)
    assert score(outcome, truth, truth).success

    off = euler_to_transform(EulerPose.from_degrees(yaw=2.0))
    scored = score(outcome, off, truth)
    assert not scored.success
    assert scored.failure_reason is FailureReason.INACCURATE
    assert scored.failed_stage is CalibrationStage.VERIFICATION
    assert math.degrees(scored.errors.yaw) == pytest.approx(2.0)

    locked = euler_to_transform(EulerPose.from_degrees(pitch=90.0))
    assert score(outcome, locked, truth).failure_reason is FailureReason.INACCURATE


def test_trial_streams_are_stable_and_independent():
    assert trial_rng(0, 3, 1).uniform() == trial_rng(0, 3, 1).uniform()
    draws = {trial_rng(0, trial, slave).uniform() for trial in range(3) for slave in range(4)}
    assert len(draws) == 12


def test_master_model_has_structure(master_model):
    assert master_model.non_ground is not None
    assert master_model.degenerate_reason == ""
    assert master_model.plane.normal[2] > 0.999
    assert len(master_model.oriented) == len(master_model.cloud)


@pytest.mark.parametrize("slave_id", ["front", "back", "left", "right"])
def test_zero_perturbation_noiseless_calibration(slave_id, master_model, noiseless_captures, rig, pipeline_config):
    truth = relative_extrinsics(rig)[slave_id]
    outcome = calibrate_slave(
        master_model, noiseless_captures.cloud(slave_id), pipeline_config, initial=truth, truth=truth
    )
    assert outcome.success, outcome.message
    rotation_deg, shift = _max_errors(outcome.errors)
    assert rotation_deg < 0.25
    assert shift < 0.02


def test_stage_trace_is_ordered_and_never_gets_worse(master_model, noiseless_captures, rig, pipeline_config):
    truth = relative_extrinsics(rig)["left"]
    initial = truth.compose(euler_to_transform(EulerPose.from_degrees(pitch=4.0, roll=-3.0, yaw=20.0, x=0.08, y=-0.05, z=0.06)))
    result = calibrate_pair(
        master_model.cloud, noiseless_captures.cloud("left"), pipeline_config, initial, master_model
    )
    stages = [record.stage for record in result.trace]
    assert stages == [TraceStage.INITIAL, TraceStage.GROUND, TraceStage.ROUGH, TraceStage.ICPN, TraceStage.OCTREE]
    costs = [record.cost for record in result.trace[2:]]
    assert all(later <= earlier for earlier, later in zip(costs, costs[1:]))
    assert costs[-1] < result.trace[0].cost
    np.testing.assert_allclose(result.trace[-1].pose.as_matrix(), result.transform.as_matrix())
    assert rotation_error_deg(result.transform.rotation, truth.rotation) < 0.5


def test_stage_one_only_lands_near_truth(master_model, noiseless_captures, rig, pipeline_config):
    truth = relative_extrinsics(rig)["back"]
    initial = truth.compose(euler_to_transform(EulerPose.from_degrees(pitch=-5.0, roll=6.0, yaw=-30.0, x=0.1)))
    cfg = pipeline_config._replace(run_icpn=False, run_octree=False)
    result = calibrate_pair(master_model.cloud, noiseless_captures.cloud("back"), cfg, initial, master_model)
    assert [record.stage for record in result.trace][-1] is TraceStage.ROUGH

    ground = pose_errors(result.trace[1].pose, truth)
    assert math.degrees(max(abs(ground.pitch), abs(ground.roll))) <= 1.0
    assert abs(ground.z) <= 0.02

    rotation_deg, shift = _max_errors(pose_errors(result.transform, truth))
    assert rotation_deg < 2.0
    assert shift < 0.2


def test_ground_only_scene_is_degenerate(rig, pipeline_config):
    scene = generate_scene(SceneSpec(allow_degenerate=True))
    captures = capture(scene, rig)
    model = prepare_master(captures.cloud("top"), pipeline_config)
    assert model.non_ground is None
    assert model.degenerate_reason

    truth = relative_extrinsics(rig)["front"]
    outcome = calibrate_slave(model, captures.cloud("front"), pipeline_config, initial=truth, truth=truth)
    assert not outcome.success
    assert outcome.failure_reason is FailureReason.DEGENERATE_SCENE
    assert outcome.failed_stage is CalibrationStage.PLANAR_SEARCH
    assert outcome.estimate is None
    assert outcome.errors is None


def test_slave_that_sees_almost_nothing_fails_with_a_reason(master_model, noiseless_captures, rig, pipeline_config):
    right = noiseless_captures.cloud("right")
    nearby = right.subset(np.flatnonzero(np.linalg.norm(right.points, axis=1) <= 1.5))
    truth = relative_extrinsics(rig)["right"]
    outcome = calibrate_slave(master_model, nearby, pipeline_config, initial=truth, truth=truth)
    assert not outcome.success
    assert outcome.failure_reason is FailureReason.NO_GROUND
    assert outcome.failed_stage is CalibrationStage.GROUND
    assert "right" in outcome.message


def test_slave_placed_far_from_master_fails(master_model, pipeline_config):
    room = corner_room(frame_id="stray")
    outcome = calibrate_slave(master_model, room, pipeline_config, initial=euler_to_transform(EulerPose(x=200.0)))
    assert not outcome.success
    assert outcome.failure_reason is not FailureReason.NONE
    assert outcome.failed_stage is not None



def test_gimbal_locked_estimate_fails_instead_of_raising(monkeypatch, master_model, noiseless_captures, pipeline_config):
    upright = euler_to_transform(EulerPose.from_degrees(pitch=90.0, x=1.0))
    trace = (
        StageRecord(TraceStage.INITIAL, RigidTransform.identity(), 0.4),
        StageRecord(TraceStage.OCTREE, upright, 0.01),
    )
    monkeypatch.setattr("src.pipeline.calibrate.calibrate_pair", lambda *args: PairCalibration(upright, trace))

    outcome = calibrate_slave(master_model, noiseless_captures.cloud("front"), pipeline_config)
    assert not outcome.success
    assert outcome.failure_reason is FailureReason.INACCURATE
    assert outcome.failed_stage is CalibrationStage.VERIFICATION
    assert outcome.estimate is None
    assert outcome.trace is trace

    stages = report_to_dict(CalibrationReport((outcome,)))["calibrations"][0]["stages"]
    assert stages[0]["pose"]["yaw"] == 0.0
    assert stages[1]["pose"] is None
    display_stage_trace(outcome)

def test_small_experiment_reports_every_slave(scene_spec, rig, pipeline_config):
    perturbation = PerturbationSpec(rotation_bound=math.radians(10.0), translation_bound=0.05, seed=2)
    report = run_experiment(scene_spec, rig, perturbation, trials=1, cfg=pipeline_config)
    assert [outcome.slave_id for outcome in report.outcomes] == ["back", "front", "left", "right"]
    assert report.trials == 1
    assert report.seed == 2
    for outcome in report.outcomes:
        assert outcome.deviation is not None
        assert max(abs(value) for value in outcome.deviation[:3]) <= math.radians(10.0)
        assert outcome.success, f"{outcome.slave_id}: {outcome.failure_reason} {outcome.message}"
    assert report.success_rate == 1.0


def test_experiment_reports_progress_and_rejects_zero_trials(scene_spec, rig, pipeline_config):
    with pytest.raises(InvalidArgumentError):
        run_experiment(scene_spec, rig, PerturbationSpec(), trials=0)

    calls = []
    degenerate = SceneSpec(allow_degenerate=True)
    report = run_experiment(degenerate, rig, PerturbationSpec(), 2, pipeline_config, lambda done, total: calls.append((done, total)))
    assert calls == [(1, 2), (2, 2)]
    assert len(report.outcomes) == 8
    assert {outcome.failure_reason for outcome in report.outcomes} == {FailureReason.DEGENERATE_SCENE}



def test_scene_sweep_reports_each_scene_with_shared_perturbations(scene_spec, rig, pipeline_config):
    perturbation = PerturbationSpec(rotation_bound=math.radians(10.0), translation_bound=0.05, seed=2)
    layouts = [random_layout(scene_spec, seed) for seed in (11, 12)]
    calls = []
    reports = run_scene_sweep(layouts, rig, perturbation, 1, pipeline_config, lambda done, total: calls.append((done, total)))
    assert calls == [(1, 2), (2, 2)]
    assert len(reports) == 2
    for report in reports:
        assert [outcome.slave_id for outcome in report.outcomes] == ["back", "front", "left", "right"]
    deviations = [[outcome.deviation for outcome in report.outcomes] for report in reports]
    assert deviations[0] == deviations[1]
    assert sum(report.success_rate for report in reports) / 2 >= 0.75


def test_scene_sweep_needs_a_scene(rig):
    with pytest.raises(InvalidArgumentError):
        run_scene_sweep([], rig, PerturbationSpec(), 1)

@pytest.mark.slow
def test_fifty_trials_succeed_at_least_ninety_percent(scene_spec, rig, pipeline_config):
    report = run_experiment(scene_spec, rig, PerturbationSpec(), trials=50, cfg=pipeline_config)
    assert report.success_rate >= 0.9


@pytest.mark.slow
def test_noiseless_trials_are_precise(scene_spec, rig, pipeline_config):
    noiseless = scene_spec._replace(noise_sigma=0.0)
    report = run_experiment(noiseless, rig, PerturbationSpec(seed=1), trials=20, cfg=pipeline_config)
    for outcome in report.outcomes:
        assert outcome.success, f"trial {outcome.trial} {outcome.slave_id}: {outcome.failure_reason} {outcome.message}"
        rotation_deg, shift = _max_errors(outcome.errors)
        assert rotation_deg < 0.1
        assert shift < 0.01


@pytest.mark.slow
def test_noiseless_fifty_trial_mean_errors_are_small(scene_spec, rig, pipeline_config):
    noiseless = scene_spec._replace(noise_sigma=0.0)
    report = run_experiment(noiseless, rig, PerturbationSpec(seed=5), trials=50, cfg=pipeline_config)
    assert report.success_rate >= 0.95
    mean_abs = errors_frame(report)[list(EULER_AXES)].abs().mean()
    assert (mean_abs[list(ROTATION_AXES)] < 0.2).all(), mean_abs.to_dict()
    assert (mean_abs[["x", "y", "z"]] < 0.02).all(), mean_abs.to_dict()


@pytest.mark.slow
def test_experiment_is_deterministic(scene_spec, rig, pipeline_config):
    first = run_experiment(scene_spec, rig, PerturbationSpec(seed=4), trials=3, cfg=pipeline_config)
    second = run_experiment(scene_spec, rig, PerturbationSpec(seed=4), trials=3, cfg=pipeline_config)
    for a, b in zip(first.outcomes, second.outcomes, strict=True):
        assert a.success == b.success
        assert a.failure_reason == b.failure_reason
        if a.estimate is not None:
            np.testing.assert_array_equal(a.estimate, b.estimate)
