"""CLI module for interactive terminal output."""

from src.cli.console import (
    configure_logging,
    console,
    print_error,
    print_info,
    print_phase_header,
    print_success,
    print_title,
    print_verbose,
    print_warning,
    set_quiet_mode,
    set_verbose_mode,
)
from src.cli.progress import create_progress_bar, run_with_spinner, spinner, trial_progress
from src.cli.tables import (
    display_calibration_result,
    display_experiment_summary,
    display_stage_trace,
    display_sweep_summary,
)


__all__ = [
    "configure_logging",
    "console",
    "create_progress_bar",
    "display_calibration_result",
    "display_experiment_summary",
    "display_stage_trace",
    "display_sweep_summary",
    "print_error",
    "print_info",
    "print_phase_header",
    "print_success",
    "print_title",
    "print_verbose",
    "print_warning",
    "run_with_spinner",
    "set_quiet_mode",
    "set_verbose_mode",
    "spinner",
    "trial_progress",
]
