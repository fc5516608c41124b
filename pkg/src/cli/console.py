"""Console utilities for formatted terminal output and log routing."""

import logging
from dataclasses import dataclass

from rich.console import Console
from rich.logging import RichHandler
from rich.rule import Rule
from rich.text import Text


@dataclass
class ConsoleConfig:
    """Configuration for console output modes."""

    quiet: bool = False
    verbose: bool = False


console = Console()
_config: ConsoleConfig = ConsoleConfig()


def set_quiet_mode(quiet: bool) -> None:
    """Enable or disable quiet mode (minimal output)."""
    _config.quiet = quiet


def set_verbose_mode(verbose: bool) -> None:
    """Enable or disable verbose mode (detailed output)."""
    _config.verbose = verbose


def is_quiet() -> bool:
    return _config.quiet


def is_verbose() -> bool:
    return _config.verbose


def configure_logging(verbose: bool = False, quiet: bool = False) -> None:
    """Route library logs through rich on the shared console.

    WARNING by default, DEBUG with ``verbose``, ERROR with ``quiet``.
    """
    level = logging.ERROR if quiet else logging.DEBUG if verbose else logging.WARNING
    handler = RichHandler(console=console, show_path=False, rich_tracebacks=True)
    logging.basicConfig(
        level=level,
        format="%(name)s: %(message)s",
        datefmt="[%X]",
        handlers=[handler],
        force=True,
    )


def print_success(message: str) -> None:
    """Print a success message with green checkmark."""
    if not _config.quiet:
        console.print(f"[green]✓[/green] {message}")


def print_info(message: str) -> None:
    """Print an info message with blue bullet."""
    if not _config.quiet:
        console.print(f"[blue]•[/blue] {message}")


def print_warning(message: str) -> None:
    if not _config.quiet:
        console.print(f"[yellow]⚠[/yellow] {message}")


def print_error(message: str) -> None:
    """Print an error message with red X, even in quiet mode."""
    console.print(f"[red]✗[/red] {message}")


def print_verbose(message: str) -> None:
    """Print a message only in verbose mode."""
    if _config.verbose and not _config.quiet:
        console.print(f"  [dim]{message}[/dim]")


def print_phase_header(phase_num: int | str, title: str) -> None:
    """Print a stage header with horizontal rule."""
    if not _config.quiet:
        console.print()
        console.print(Rule(f"Stage {phase_num}: {title}", style="cyan"))


def print_title(title: str) -> None:
    if not _config.quiet:
        console.print()
        console.print(Text(title, style="bold cyan"), justify="center")
        console.print()
