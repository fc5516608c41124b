"""Calibration pipeline: per-pair calibration and repeated-trial experiments."""

from src.pipeline.calibrate import (
    alignment_cost,
    calibrate_pair,
    calibrate_slave,
    failed_outcome,
    is_accurate,
    overlap_fraction,
    pose_errors,
    prepare_master,
    score,
)
from src.pipeline.experiment import run_experiment, run_scene_sweep, trial_rng
from src.pipeline.types import (
    CalibrationReport,
    MasterModel,
    PairCalibration,
    PipelineConfig,
    StageRecord,
    TraceStage,
    TrialOutcome,
)


__all__ = [
    "CalibrationReport",
    "MasterModel",
    "PairCalibration",
    "PipelineConfig",
    "StageRecord",
    "TraceStage",
    "TrialOutcome",
    "alignment_cost",
    "calibrate_pair",
    "calibrate_slave",
    "failed_outcome",
    "is_accurate",
    "overlap_fraction",
    "pose_errors",
    "prepare_master",
    "run_experiment",
    "run_scene_sweep",
    "score",
    "trial_rng",
]
