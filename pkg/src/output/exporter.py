"""JSON export and import of calibration reports.

Angles are written in degrees, translations in meters. Key order is fixed so
that identical runs produce byte-identical files; stage timings are left out
unless asked for.
"""

import json
import math
from collections.abc import Sequence
from pathlib import Path
from typing import Any

import pandas as pd

from src.constants import EULER_AXES, ROTATION_AXES
from src.errors import CalibrationStage, ConfigError, FailureReason, InvalidArgumentError
from src.geometry import EulerPose, euler_to_transform, try_transform_to_euler
from src.pipeline import CalibrationReport, StageRecord, TraceStage, TrialOutcome


REPORT_VERSION = 1
_PRECISION = 9


def _number(value: float) -> float | None:
    if value is None or not math.isfinite(value):
        return None
    return round(float(value), _PRECISION)


def pose_to_dict(pose: EulerPose | None) -> dict[str, float | None] | None:
    if pose is None:
        return None
    return {axis: _number(value) for axis, value in zip(EULER_AXES, pose.to_degrees(), strict=True)}


def pose_from_dict(values: dict[str, float] | None) -> EulerPose | None:
    if values is None:
        return None
    try:
        return EulerPose.from_degrees(**{axis: float(values[axis]) for axis in EULER_AXES})
    except (KeyError, TypeError, ValueError) as error:
        raise ConfigError(f"pose needs numeric {', '.join(EULER_AXES)}: {values}") from error


def errors_frame(report: CalibrationReport, success_only: bool = False) -> pd.DataFrame:
    """One row per outcome with known errors: slave_id plus the six axes (degrees / meters)."""
    rows = [
        {"slave_id": outcome.slave_id, **dict(zip(EULER_AXES, outcome.errors.to_degrees(), strict=True))}
        for outcome in report.outcomes
        if outcome.errors is not None and (outcome.success or not success_only)
    ]
    return pd.DataFrame(rows, columns=["slave_id", *EULER_AXES])


def estimates_frame(report: CalibrationReport) -> pd.DataFrame:
    """Estimated poses per slave; angles unwrapped around each slave's first estimate."""
    rows = [
        {"slave_id": outcome.slave_id, **dict(zip(EULER_AXES, outcome.estimate.to_degrees(), strict=True))}
        for outcome in report.outcomes
        if outcome.estimate is not None
    ]
    frame = pd.DataFrame(rows, columns=["slave_id", *EULER_AXES])
    for axis in ROTATION_AXES:
        reference = frame.groupby("slave_id")[axis].transform("first")
        frame[axis] = (frame[axis] - reference + 180.0) % 360.0 - 180.0 + reference
    return frame


def _stats(frame: pd.DataFrame) -> dict[str, Any]:
    values = frame[list(EULER_AXES)]
    return {
        "count": len(frame),
        "mean": {axis: _number(v) for axis, v in values.mean().items()},
        "std": {axis: _number(v) for axis, v in values.std(ddof=0).items()},
    }


def aggregate(frame: pd.DataFrame, slave_ids: list[str]) -> dict[str, Any]:
    """Per-slave and overall mean/std per axis (population std)."""
    groups = dict(list(frame.groupby("slave_id", sort=False)))
    per_slave = {
        slave_id: _stats(groups[slave_id]) for slave_id in slave_ids if slave_id in groups
    }
    return {"per_slave": per_slave, "overall": _stats(frame) if len(frame) else None}


def _stage_to_dict(record: StageRecord, include_timing: bool) -> dict[str, Any]:
    entry: dict[str, Any] = {
        "stage": str(record.stage),
        "pose": pose_to_dict(try_transform_to_euler(record.pose)),
        "cost": _number(record.cost),
        "accepted": record.accepted,
    }
    if include_timing:
        entry["elapsed_ms"] = round(record.elapsed_ms, 3)
    return entry


def _outcome_to_dict(outcome: TrialOutcome, include_timing: bool) -> dict[str, Any]:
    return {
        "trial": outcome.trial,
        "slave_id": outcome.slave_id,
        "success": outcome.success,
        "failure_reason": str(outcome.failure_reason),
        "failed_stage": str(outcome.failed_stage) if outcome.failed_stage else None,
        "message": outcome.message,
        "estimate": pose_to_dict(outcome.estimate),
        "deviation": pose_to_dict(outcome.deviation),
        "errors": pose_to_dict(outcome.errors),
        "stages": [_stage_to_dict(record, include_timing) for record in outcome.trace],
    }


def report_to_dict(report: CalibrationReport, include_timing: bool = False) -> dict[str, Any]:
    if not report.outcomes:
        raise InvalidArgumentError("report has no calibrations")
    slave_ids = report.slave_ids
    reasons = pd.Series(
        [str(outcome.failure_reason) for outcome in report.outcomes if not outcome.success],
        dtype="object",
    )
    return {
        "version": REPORT_VERSION,
        "summary": {
            "master_id": report.master_id,
            "slave_ids": slave_ids,
            "seed": report.seed,
            "trials": report.trials,
            "calibrations": len(report.outcomes),
            "successes": sum(outcome.success for outcome in report.outcomes),
            "success_rate": _number(report.success_rate),
        },
        "failures": {str(reason): int(count) for reason, count in sorted(reasons.value_counts().items())},
        "errors": {
            "all": aggregate(errors_frame(report), slave_ids),
            "success_only": aggregate(errors_frame(report, success_only=True), slave_ids),
        },
        "estimates": aggregate(estimates_frame(report), slave_ids)["per_slave"],
        "calibrations": [
            _outcome_to_dict(outcome, include_timing) for outcome in report.outcomes
        ],
    }


def _dump(content: dict[str, Any], path: Path) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as f:
        json.dump(content, f, indent=2)
        f.write("\n")



def write_report(
    report: CalibrationReport,
    path: Path,
    include_timing: bool = False,
) -> None:
    """Write ``report`` as indented UTF-8 JSON."""
    _dump(report_to_dict(report, include_timing), path)


def scene_means_frame(reports: Sequence[CalibrationReport]) -> pd.DataFrame:
    """Mean successful error per (scene, slave); a scene whose slave never succeeded has no row."""
    frames = [
        errors_frame(report, success_only=True).assign(scene=index)
        for index, report in enumerate(reports)
    ]
    errors = pd.concat(frames, ignore_index=True)
    means = errors.groupby(["scene", "slave_id"], sort=False)[list(EULER_AXES)].mean()
    return means.reset_index()


def sweep_to_dict(
    reports: Sequence[CalibrationReport],
    include_timing: bool = False,
) -> dict[str, Any]:
    """Per-scene reports plus the spread of per-scene mean errors across scenes."""
    if not reports:
        raise InvalidArgumentError("sweep has no scenes")
    means = scene_means_frame(reports)
    slave_ids = list(dict.fromkeys(s for report in reports for s in report.slave_ids))
    outcomes = [outcome for report in reports for outcome in report.outcomes]
    successes = sum(outcome.success for outcome in outcomes)
    return {
        "version": REPORT_VERSION,
        "summary": {
            "scenes": len(reports),
            "trials": reports[0].trials,
            "calibrations": len(outcomes),
            "successes": successes,
            "success_rate": _number(successes / len(outcomes) if outcomes else 0.0),
            "success_rate_per_scene": [_number(report.success_rate) for report in reports],
        },
        "consistency": aggregate(means, slave_ids),
        "scenes": [report_to_dict(report, include_timing) for report in reports],
    }


def write_sweep(
    reports: Sequence[CalibrationReport],
    path: Path,
    include_timing: bool = False,
) -> None:
    _dump(sweep_to_dict(reports, include_timing), path)


def _stage_from_dict(entry: dict[str, Any]) -> StageRecord:
    pose = pose_from_dict(entry["pose"])
    return StageRecord(
        stage=TraceStage(entry["stage"]),
        pose=euler_to_transform(pose if pose is not None else EulerPose()),
        cost=math.inf if entry["cost"] is None else float(entry["cost"]),
        accepted=bool(entry["accepted"]),
        elapsed_ms=float(entry.get("elapsed_ms", 0.0)),
    )


def _outcome_from_dict(entry: dict[str, Any]) -> TrialOutcome:
    stage = entry.get("failed_stage")
    return TrialOutcome(
        trial=int(entry["trial"]),
        slave_id=str(entry["slave_id"]),
        success=bool(entry["success"]),
        failure_reason=FailureReason(entry["failure_reason"]),
        failed_stage=CalibrationStage(stage) if stage else None,
        message=str(entry.get("message", "")),
        estimate=pose_from_dict(entry.get("estimate")),
        deviation=pose_from_dict(entry.get("deviation")),
        errors=pose_from_dict(entry.get("errors")),
        trace=tuple(_stage_from_dict(stage_entry) for stage_entry in entry.get("stages", [])),
    )


def load_report(path: Path) -> CalibrationReport:
    with path.open(encoding="utf-8") as f:
        try:
            content = json.load(f)
        except json.JSONDecodeError as error:
            raise ConfigError(f"{path}:{error.lineno}: {error.msg}") from error
    try:
        summary = content["summary"]
        outcomes = tuple(_outcome_from_dict(entry) for entry in content["calibrations"])
        return CalibrationReport(
            outcomes,
            master_id=summary["master_id"],
            seed=int(summary["seed"]),
            trials=int(summary["trials"]),
        )
    except (KeyError, TypeError, ValueError) as error:
        raise ConfigError(f"{path}: not a calibration report ({error})") from error
