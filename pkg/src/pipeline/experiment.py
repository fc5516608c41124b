"""Repeated-perturbation experiments on a synthetic capture."""

import logging
from collections.abc import Callable, Sequence

import numpy as np

from src.errors import CalibrationError, InvalidArgumentError
from src.pipeline.calibrate import calibrate_slave, failed_outcome, prepare_master
from src.pipeline.types import CalibrationReport, PipelineConfig, TrialOutcome
from src.simulation import (
    PerturbationSpec,
    RigSpec,
    SceneSpec,
    capture,
    generate_scene,
    perturb,
    relative_extrinsics,
)


logger = logging.getLogger(__name__)


def trial_rng(seed: int, trial: int, slave_index: int) -> np.random.Generator:
    """Independent stream per (trial, slave), stable under reordering."""
    return np.random.default_rng(np.random.SeedSequence([seed, trial, slave_index]))


def run_experiment(
    scene: SceneSpec,
    rig: RigSpec,
    perturbation: PerturbationSpec,
    trials: int,
    cfg: PipelineConfig | None = None,
    on_progress: Callable[[int, int], None] | None = None,
) -> CalibrationReport:
    """Capture the scene once, then calibrate every slave from ``trials`` perturbed guesses.

    Failures are counted in the report, never raised.
    """
    if trials < 1:
        raise InvalidArgumentError(f"trials must be >= 1, got {trials}")
    if cfg is None:
        cfg = PipelineConfig()
    cfg = cfg._replace(master_id=rig.master_id)

    captures = capture(generate_scene(scene), rig)
    truth = relative_extrinsics(rig)
    to_master = rig.master.pose.inverse()

    model = None
    master_error = None
    try:
        model = prepare_master(captures.cloud(rig.master_id), cfg)
    except CalibrationError as error:
        master_error = error
        logger.error("master '%s' unusable: %s", rig.master_id, error)

    outcomes: list[TrialOutcome] = []
    for trial in range(trials):
        for slave_index, sensor in enumerate(rig.slaves):
            rng = trial_rng(perturbation.seed, trial, slave_index)
            guess, deviation = perturb(sensor.pose, perturbation, rng)
            if model is None:
                assert master_error is not None
                outcomes.append(
                    failed_outcome(master_error, sensor.frame_id, trial, deviation)
                )
                continue
            outcomes.append(
                calibrate_slave(
                    model,
                    captures.cloud(sensor.frame_id),
                    cfg,
                    initial=to_master.compose(guess),
                    truth=truth[sensor.frame_id],
                    trial=trial,
                    deviation=deviation,
                )
            )
        if on_progress is not None:
            on_progress(trial + 1, trials)

    outcomes.sort(key=lambda outcome: (outcome.trial, outcome.slave_id))
    report = CalibrationReport(tuple(outcomes), rig.master_id, perturbation.seed, trials)
    logger.info(
        "experiment: %d calibrations, success rate %.1f%%",
        len(outcomes),
        report.success_rate * 100,
    )
    return report


def run_scene_sweep(
    scenes: Sequence[SceneSpec],
    rig: RigSpec,
    perturbation: PerturbationSpec,
    trials: int,
    cfg: PipelineConfig | None = None,
    on_progress: Callable[[int, int], None] | None = None,
) -> tuple[CalibrationReport, ...]:
    """run_experiment on every scene with the same perturbation seeds; one report per scene."""
    if not scenes:
        raise InvalidArgumentError("a scene sweep needs at least one scene")
    total = trials * len(scenes)

    reports = []
    for index, scene in enumerate(scenes):
        def forward(done: int, _: int, offset: int = index * trials) -> None:
            if on_progress is not None:
                on_progress(offset + done, total)

        logger.info("scene %d/%d (seed %d)", index + 1, len(scenes), scene.seed)
        reports.append(run_experiment(scene, rig, perturbation, trials, cfg, forward))
    return tuple(reports)
