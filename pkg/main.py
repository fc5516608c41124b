import argparse
from collections.abc import Sequence
from pathlib import Path

from src.cli import (
    configure_logging,
    console,
    display_calibration_result,
    display_experiment_summary,
    display_sweep_summary,
    print_error,
    print_info,
    print_phase_header,
    print_success,
    print_title,
    print_verbose,
    print_warning,
    run_with_spinner,
    set_quiet_mode,
    set_verbose_mode,
    trial_progress,
)
from src.data import (
    load_perturbation_spec,
    load_pipeline_config,
    load_rig_spec,
    load_scene_spec,
    read_cloud_file,
    save_rig_spec,
    write_cloud,
)
from src.errors import (
    CalibrationError,
    CloudParseError,
    ConfigError,
    DegenerateDecompositionError,
    InvalidArgumentError,
)
from src.geometry import RigidTransform, euler_to_transform
from src.output import load_report, write_report, write_sweep
from src.pipeline import (
    CalibrationReport,
    PipelineConfig,
    calibrate_slave,
    failed_outcome,
    prepare_master,
    run_experiment,
    run_scene_sweep,
    score,
    trial_rng,
)
from src.simulation import (
    PerturbationSpec,
    RigSpec,
    SceneSpec,
    SensorSpec,
    capture,
    generate_scene,
    perturb,
    random_layout,
    relative_extrinsics,
)


EXIT_OK = 0
EXIT_FAILED_CALIBRATION = 1
EXIT_USAGE = 2


def _initial_guesses(rig: RigSpec | None, slave_ids: list[str]) -> dict[str, RigidTransform]:
    if rig is None:
        return {slave_id: RigidTransform.identity() for slave_id in slave_ids}
    to_master = rig.master.pose.inverse()
    guesses = {}
    for slave_id in slave_ids:
        try:
            guesses[slave_id] = to_master.compose(rig.sensor(slave_id).pose)
        except KeyError as error:
            raise ConfigError(f"rig has no sensor '{slave_id}'") from error
    return guesses


def _calibrate(args: argparse.Namespace) -> int:
    """Calibrate every slave file against the master file."""
    cfg = load_pipeline_config(args.config)
    if args.seed is not None:
        cfg = cfg._replace(seed=args.seed)

    master_file = read_cloud_file(args.master)
    slave_files = [read_cloud_file(path) for path in args.slaves]
    for cloud_file in (master_file, *slave_files):
        print_verbose(
            f"{cloud_file.path}: {len(cloud_file.cloud)} points as '{cloud_file.cloud.frame_id}'"
            + (f", {cloud_file.dropped_rows} NaN rows dropped" if cloud_file.dropped_rows else "")
        )
    master = master_file.cloud
    slaves = [cloud_file.cloud for cloud_file in slave_files]
    slave_ids = [slave.frame_id for slave in slaves]
    if master.frame_id in slave_ids or len(set(slave_ids)) != len(slave_ids):
        raise InvalidArgumentError(f"frame ids must be distinct: master '{master.frame_id}', slaves {slave_ids}")

    cfg = cfg._replace(master_id=master.frame_id)
    guesses = _initial_guesses(load_rig_spec(args.rig) if args.rig else None, slave_ids)

    print_phase_header(1, "Master Model")
    try:
        model = run_with_spinner("Fitting master ground and normals...", lambda: prepare_master(master, cfg))
    except CalibrationError as error:
        print_error(f"master '{master.frame_id}' unusable: {error}")
        outcomes = [failed_outcome(error, slave_id) for slave_id in slave_ids]
    else:
        print_success(f"Master '{master.frame_id}' prepared ({len(master)} points)")
        print_phase_header(2, "Slave Calibration")
        outcomes = []
        for slave in slaves:
            outcome = run_with_spinner(
                f"Calibrating '{slave.frame_id}'...",
                lambda slave=slave: calibrate_slave(model, slave, cfg, guesses[slave.frame_id]),
            )
            outcomes.append(outcome)
            if outcome.success:
                print_success(f"'{slave.frame_id}' calibrated")
            else:
                print_warning(f"'{slave.frame_id}' failed: {outcome.failure_reason} at {outcome.failed_stage}")

    report = CalibrationReport(tuple(outcomes), master.frame_id, cfg.seed, trials=1)
    display_calibration_result(report.outcomes)
    write_report(report, args.out, include_timing=args.timing)
    print_success(f"Report written to {args.out}")
    return EXIT_OK if all(outcome.success for outcome in outcomes) else EXIT_FAILED_CALIBRATION


def _simulate(args: argparse.Namespace) -> int:
    """Write one .pcd per sensor plus the ground-truth rig (and perturbed guesses)."""
    scene_spec = load_scene_spec(args.scene)
    rig = load_rig_spec(args.rig)

    print_phase_header(1, "Scene Generation")
    scene = run_with_spinner("Sampling scene surfaces...", lambda: generate_scene(scene_spec))
    print_success(f"Scene sampled ({len(scene)} points, {len(scene_spec.primitives)} primitives)")

    print_phase_header(2, "Capture")
    captures = capture(scene, rig)
    for frame_id, cloud in captures.clouds.items():
        write_cloud(cloud, args.out / f"{frame_id}.pcd")
        print_verbose(f"{frame_id}: {len(cloud)} points")
    for frame_id in captures.sparse:
        print_warning(f"'{frame_id}' captured a sparse cloud")
    save_rig_spec(rig, args.out / "rig.json")
    print_success(f"Wrote {len(captures.clouds)} clouds and rig.json to {args.out}")

    if args.perturb:
        perturbation = load_perturbation_spec(args.perturb)
        seed = perturbation.seed if args.seed is None else args.seed
        sensors = [rig.master]
        for index, sensor in enumerate(rig.slaves):
            guess, _ = perturb(sensor.pose, perturbation, trial_rng(seed, 0, index))
            sensors.append(SensorSpec(sensor.frame_id, guess))
        initial = RigSpec(
            tuple(sensors), rig.max_range, rig.fov, rig.noise_sigma, rig.seed, rig.master_id
        )
        save_rig_spec(initial, args.out / "rig_initial.json")
        print_success("Wrote perturbed initial guesses to rig_initial.json")
    return EXIT_OK


def _experiment(args: argparse.Namespace) -> int:
    """Repeated perturbed calibrations on a synthetic capture."""
    scene_spec = load_scene_spec(args.scene)
    rig = load_rig_spec(args.rig)
    perturbation = load_perturbation_spec(args.perturb)
    if args.seed is not None:
        perturbation = perturbation._replace(seed=args.seed)
    cfg = load_pipeline_config(args.config)

    if args.scenes is not None:
        return _scene_sweep(args, scene_spec, rig, perturbation, cfg)

    print_phase_header(1, "Experiment")
    print_info(
        f"{args.trials} trials x {len(rig.slaves)} slaves, "
        f"seed {perturbation.seed}"
    )
    with trial_progress("Running trials...", args.trials) as on_progress:
        report = run_experiment(scene_spec, rig, perturbation, args.trials, cfg, on_progress)

    display_experiment_summary(report)
    write_report(report, args.out, include_timing=args.timing)
    print_success(f"Report written to {args.out}")
    return EXIT_OK


def _scene_sweep(
    args: argparse.Namespace,
    scene_spec: SceneSpec,
    rig: RigSpec,
    perturbation: PerturbationSpec,
    cfg: PipelineConfig,
) -> int:
    """The experiment repeated on randomly laid out scenes sharing the scene's ground and noise."""
    if args.scenes < 1:
        raise InvalidArgumentError(f"--scenes must be >= 1, got {args.scenes}")
    layouts = [random_layout(scene_spec, scene_spec.seed + index) for index in range(args.scenes)]

    print_phase_header(1, "Scene sweep")
    print_info(
        f"{args.scenes} scenes x {args.trials} trials x {len(rig.slaves)} slaves, "
        f"seed {perturbation.seed}"
    )
    with trial_progress("Running trials...", args.scenes * args.trials) as on_progress:
        reports = run_scene_sweep(layouts, rig, perturbation, args.trials, cfg, on_progress)

    display_sweep_summary(reports)
    write_sweep(reports, args.out, include_timing=args.timing)
    print_success(f"Sweep report written to {args.out}")
    return EXIT_OK


def _evaluate(args: argparse.Namespace) -> int:
    """Score an existing calibration report against a ground-truth rig."""
    report = load_report(args.estimate)
    truth = relative_extrinsics(load_rig_spec(args.rig))

    outcomes = []
    for outcome in report.outcomes:
        if outcome.estimate is None or outcome.slave_id not in truth:
            if outcome.slave_id not in truth:
                print_warning(f"no ground truth for '{outcome.slave_id}'")
            outcomes.append(outcome)
            continue
        outcomes.append(score(outcome, euler_to_transform(outcome.estimate), truth[outcome.slave_id]))

    evaluated = report._replace(outcomes=tuple(outcomes))
    display_calibration_result(evaluated.outcomes)
    write_report(evaluated, args.out)
    print_success(f"Evaluated report written to {args.out}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Multi-LiDAR extrinsic calibration",
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument(
        "--verbose",
        "-v",
        action="store_true",
        help="Show stage traces and debug logs",
    )
    parser.add_argument(
        "--quiet",
        "-q",
        action="store_true",
        help="Minimal output (errors only)",
    )
    parser.add_argument(
        "--no-color",
        action="store_true",
        help="Disable colored output",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    calibrate = commands.add_parser("calibrate", help="Calibrate slave clouds against a master cloud")
    calibrate.add_argument("--master", type=Path, required=True, help="Master .pcd file")
    calibrate.add_argument("--slaves", type=Path, nargs="+", required=True, help="Slave .pcd files")
    calibrate.add_argument("--config", type=Path, help="Pipeline config (default: specs/pipeline.json)")
    calibrate.add_argument("--rig", type=Path, help="Rig file with initial guesses (default: identity)")
    calibrate.add_argument("--seed", type=int, help="Override the pipeline seed")
    calibrate.add_argument("--out", type=Path, default=Path("output/calibration.json"))
    calibrate.add_argument("--timing", action="store_true", help="Include stage timings in the report")
    calibrate.set_defaults(handler=_calibrate)

    simulate = commands.add_parser("simulate", help="Capture a synthetic scene with a rig")
    simulate.add_argument("--scene", type=Path, help="Scene spec (default: specs/standard_scene.json)")
    simulate.add_argument("--rig", type=Path, help="Rig spec (default: specs/default_rig.json)")
    simulate.add_argument("--perturb", type=Path, help="Also write perturbed initial guesses")
    simulate.add_argument("--seed", type=int, help="Override the perturbation seed")
    simulate.add_argument("--out", type=Path, default=Path("output/capture"))
    simulate.set_defaults(handler=_simulate)

    experiment = commands.add_parser("experiment", help="Repeated perturbed calibrations")
    experiment.add_argument("--scene", type=Path, help="Scene spec (default: specs/standard_scene.json)")
    experiment.add_argument("--rig", type=Path, help="Rig spec (default: specs/default_rig.json)")
    experiment.add_argument("--perturb", type=Path, help="Perturbation spec (default: specs/perturbation.json)")
    experiment.add_argument("--config", type=Path, help="Pipeline config (default: specs/pipeline.json)")
    experiment.add_argument("--trials", type=int, default=50)
    experiment.add_argument("--seed", type=int, help="Override the perturbation seed")
    experiment.add_argument("--scenes", type=int, help="Repeat on N random scene layouts seeded from the scene seed")
    experiment.add_argument("--out", type=Path, default=Path("output/experiment.json"))
    experiment.add_argument("--timing", action="store_true", help="Include stage timings in the report")
    experiment.set_defaults(handler=_experiment)

    evaluate = commands.add_parser("evaluate", help="Score a calibration report against ground truth")
    evaluate.add_argument("--estimate", type=Path, required=True, help="Report written by calibrate")
    evaluate.add_argument("--rig", type=Path, required=True, help="Ground-truth rig file")
    evaluate.add_argument("--out", type=Path, default=Path("output/evaluation.json"))
    evaluate.set_defaults(handler=_evaluate)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    """Run one subcommand and return its exit code."""
    args = build_parser().parse_args(argv)

    console.no_color = args.no_color
    set_quiet_mode(args.quiet)
    set_verbose_mode(args.verbose)
    configure_logging(verbose=args.verbose, quiet=args.quiet)

    print_title("Multi-LiDAR Extrinsic Calibration")
    try:
        return args.handler(args)
    except FileNotFoundError as error:
        print_error(f"file not found: {error.filename}")
    except (CloudParseError, ConfigError, DegenerateDecompositionError, InvalidArgumentError) as error:
        print_error(str(error))
    return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
