"""Table formatters for calibration results and experiment summaries."""

import math
from collections import Counter
from collections.abc import Sequence

from rich.table import Table

from src.cli.console import console, is_quiet, is_verbose
from src.constants import EULER_AXES
from src.geometry import EulerPose, try_transform_to_euler
from src.output import errors_frame, scene_means_frame
from src.pipeline import CalibrationReport, TrialOutcome


_AXIS_LABELS = ("Pitch°", "Roll°", "Yaw°", "X m", "Y m", "Z m")


def _pose_cells(pose: EulerPose | None) -> list[str]:
    if pose is None:
        return ["-"] * len(EULER_AXES)
    degrees = pose.to_degrees()
    return [f"{value:.4f}" for value in degrees]


def _status(outcome: TrialOutcome) -> str:
    if outcome.success:
        return "[green]ok[/green]"
    return f"[red]{outcome.failure_reason}[/red] @ {outcome.failed_stage or '-'}"


def display_calibration_result(outcomes: list[TrialOutcome] | tuple[TrialOutcome, ...]) -> None:
    """Estimated slave → master extrinsics, one row per slave."""
    if is_quiet():
        return

    table = Table(title="Calibration Result", show_header=True, header_style="bold")
    table.add_column("Slave", style="cyan")
    table.add_column("Status")
    for label in _AXIS_LABELS:
        table.add_column(label, justify="right")

    for outcome in outcomes:
        table.add_row(outcome.slave_id, _status(outcome), *_pose_cells(outcome.estimate))
        if outcome.errors is not None:
            table.add_row("", "[dim]error[/dim]", *_pose_cells(outcome.errors), style="dim")

    console.print(table)
    if is_verbose():
        for outcome in outcomes:
            display_stage_trace(outcome)


def display_stage_trace(outcome: TrialOutcome) -> None:
    if not outcome.trace:
        return
    table = Table(title=f"Stages of '{outcome.slave_id}'", header_style="bold")
    table.add_column("Stage", style="cyan")
    table.add_column("Cost m²", justify="right")
    table.add_column("Accepted")
    for label in _AXIS_LABELS:
        table.add_column(label, justify="right")
    for record in outcome.trace:
        table.add_row(
            str(record.stage),
            f"{record.cost:.6f}",
            "yes" if record.accepted else "[yellow]no[/yellow]",
            *_pose_cells(try_transform_to_euler(record.pose)),
        )
    console.print(table)


def display_experiment_summary(report: CalibrationReport) -> None:
    """Success rate and mean/std of per-axis errors for each slave."""
    if is_quiet():
        return

    table = Table(
        title=f"Experiment ({report.trials} trials)", show_header=True, header_style="bold"
    )
    table.add_column("Slave", style="cyan")
    table.add_column("Success", justify="right")
    for label in _AXIS_LABELS:
        table.add_column(label, justify="right")

    frame = errors_frame(report, success_only=True)
    for slave_id in report.slave_ids:
        outcomes = [o for o in report.outcomes if o.slave_id == slave_id]
        successes = sum(o.success for o in outcomes)
        rows = frame[frame["slave_id"] == slave_id][list(EULER_AXES)]
        cells = [
            "-" if math.isnan(mean) else f"{mean:+.4f} ± {std:.4f}"
            for mean, std in zip(rows.mean(), rows.std(ddof=0), strict=True)
        ]
        table.add_row(slave_id, f"{successes}/{len(outcomes)}", *cells)

    console.print(table)
    console.print(f"Overall success rate: [bold]{report.success_rate:.1%}[/bold]")

    failures = [o for o in report.outcomes if not o.success]
    if failures:
        reasons = Counter(
            f"{o.failure_reason} @ {o.failed_stage or '-'}" for o in failures
        )
        for key, count in sorted(reasons.items()):
            console.print(f"  [yellow]{count}[/yellow] × {key}")


def display_sweep_summary(reports: Sequence[CalibrationReport]) -> None:
    """Success rate per scene, then the spread of per-scene mean errors for each slave."""
    if is_quiet():
        return

    scenes = Table(title=f"Scenes ({len(reports)})", header_style="bold")
    scenes.add_column("Scene", justify="right")
    scenes.add_column("Success", justify="right")
    for index, report in enumerate(reports):
        successes = sum(o.success for o in report.outcomes)
        scenes.add_row(str(index), f"{successes}/{len(report.outcomes)}")
    console.print(scenes)

    table = Table(title="Across-scene spread of mean errors", header_style="bold")
    table.add_column("Slave", style="cyan")
    table.add_column("Scenes", justify="right")
    for label in _AXIS_LABELS:
        table.add_column(label, justify="right")
    means = scene_means_frame(reports)
    for slave_id, rows in means.groupby("slave_id", sort=False):
        values = rows[list(EULER_AXES)]
        cells = [
            f"{mean:+.4f} ± {std:.4f}"
            for mean, std in zip(values.mean(), values.std(ddof=0), strict=True)
        ]
        table.add_row(str(slave_id), str(len(rows)), *cells)
    console.print(table)
