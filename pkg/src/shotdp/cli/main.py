"""
Main CLI entry point for shotdp
"""

from pathlib import Path
from typing import Any, Dict, List, Optional

import typer
from pydantic import ValidationError
from rich.box import ROUNDED, SIMPLE
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from shotdp.cli.data import data_app
from shotdp.cli.study import study_app
from shotdp.config import SystemConfig
from shotdp.experiments.config import ExperimentConfig
from shotdp.experiments.runner import CellOutput, ExperimentRunner
from shotdp.training.config import format_shots, parse_shots
from shotdp.utils.logger import setup_system_logger

cli = typer.Typer(
    name="shotdp",
    help="Differentially private training of variational quantum classifiers",
    add_completion=True,
)

cli.add_typer(study_app, name="study", help="Benchmark studies")
cli.add_typer(data_app, name="data", help="Dataset commands")

console = Console()


def print_error(message: str, title: str = "Error") -> None:
    """Red error panel"""
    console.print(
        Panel(
            f"[bold red]Error:[/bold red] {message}",
            title=f"[red]❌ {title}[/red]",
            border_style="red",
        )
    )


def format_validation_error(error: ValidationError) -> str:
    """One line per invalid field: ``section.field: message``"""
    lines = []
    for item in error.errors():
        location = ".".join(str(part) for part in item["loc"]) or "config"
        lines.append(f"{location}: {item['msg']}")
    return "\n".join(lines)


def load_experiment(
    config_file: Optional[Path], overrides: Dict[str, Any]
) -> ExperimentConfig:
    """
    Load the experiment config, printing errors and exiting with code 1

    Nothing is computed before the configuration is valid.
    """
    try:
        if config_file is None:
            return ExperimentConfig.from_dict({}, overrides)
        return ExperimentConfig.from_file(config_file, overrides)
    except ValidationError as e:
        print_error(format_validation_error(e), "Invalid Configuration")
        raise typer.Exit(code=1)
    except (OSError, ValueError) as e:
        print_error(str(e), "Configuration Error")
        raise typer.Exit(code=1)


def system_settings(workers: Optional[int] = None) -> SystemConfig:
    """SystemConfig from the environment with CLI overrides, logging set up"""
    config = SystemConfig.from_env()
    if workers is not None:
        config.workers = workers
    errors = config.validate()
    if errors:
        message = "; ".join(f"{k}: {', '.join(v)}" for k, v in errors.items())
        print_error(message, "Invalid System Settings")
        raise typer.Exit(code=1)
    setup_system_logger(config)
    return config


def results_table(outputs: List[CellOutput]) -> Table:
    """Table of finished grid cells"""
    table = Table(
        show_header=True, header_style="bold blue", border_style="cyan", box=ROUNDED
    )
    table.add_column("Mode", style="cyan")
    table.add_column("ε", justify="right")
    table.add_column("Shots", justify="right")
    table.add_column("α", justify="right")
    table.add_column("Seed", justify="right")
    table.add_column("Accuracy", justify="right", style="green")
    table.add_column("Summary", style="magenta")
    for output in outputs:
        cell = output.cell
        table.add_row(
            cell.mode.value,
            f"{cell.epsilon:g}",
            format_shots(cell.n_shots),
            f"{cell.alpha:g}",
            str(cell.seed),
            f"{output.final_accuracy:.4f}",
            output.summary_path.name,
        )
    return table


@cli.callback(invoke_without_command=True)
def main(
    ctx: typer.Context,
    version: bool = typer.Option(
        False, "--version", "-v", help="Show version information"
    ),
):
    """Differentially private training of variational quantum classifiers"""
    if ctx.invoked_subcommand is None:
        if version:
            show_version()
        else:
            show_help()


def show_version() -> None:
    """Print the version panel"""
    from shotdp import __version__

    console.print(
        Panel(
            f"[bold green]shotdp[/bold green]\n"
            f"[bold blue]Version:[/bold blue] {__version__}",
            title="[blue]📦 Library Information[/blue]",
            border_style="blue",
            box=ROUNDED,
        )
    )


def show_help() -> None:
    """Show the command overview"""
    console.print(
        Panel(
            "Shot-noise aware differential privacy for variational quantum classifiers",
            border_style="cyan",
            box=SIMPLE,
        )
    )

    table = Table(
        show_header=True, header_style="bold blue", border_style="cyan", box=ROUNDED
    )
    table.add_column("Command", style="cyan")
    table.add_column("Description", style="magenta")
    for cmd, desc in [
        ("shotdp run", "Run an experiment config"),
        ("shotdp study", "Run a benchmark study"),
        ("shotdp data generate", "Write a generated dataset to CSV"),
        ("shotdp version", "Show version information"),
    ]:
        table.add_row(cmd, desc)
    console.print(table)

    console.print(
        Panel(
            "[bold]Quick Start Guide:[/bold]\n"
            "1. Train on Bars & Stripes: [bold]shotdp run --mode adaptive --shots 1000[/bold]\n"
            "2. Run a config file: [bold]shotdp run experiment.toml[/bold]\n"
            "3. Reproduce a sweep: [bold]shotdp study accuracy-table[/bold]",
            title="[blue]🚀 Getting Started[/blue]",
            border_style="blue",
            box=ROUNDED,
        )
    )
    console.print(
        "Use [bold]shotdp [command] --help[/bold] for more information about a specific command"
    )


@cli.command(name="version")
def version_command():
    """Show version information"""
    show_version()


@cli.command(name="run")
def run_command(
    config_file: Optional[Path] = typer.Argument(
        None, help="Experiment config (.toml, .yaml or .json)"
    ),
    dataset: Optional[str] = typer.Option(
        None, "--dataset", help="bars_stripes, binary_blobs or mnist"
    ),
    mode: Optional[str] = typer.Option(
        None, "--mode", help="qshiftdp, adaptive, pixeldp or non-private"
    ),
    eps: Optional[float] = typer.Option(None, "--eps", help="Privacy budget ε"),
    delta: Optional[float] = typer.Option(None, "--delta", help="Privacy budget δ"),
    beta: Optional[float] = typer.Option(
        None, "--beta", help="Failure probability of the adaptive estimate"
    ),
    shots: Optional[str] = typer.Option(
        None, "--shots", help="Shots per shifted circuit, or 'inf'"
    ),
    alpha: Optional[float] = typer.Option(
        None, "--alpha", help="Depolarizing strength"
    ),
    batch: Optional[int] = typer.Option(None, "--batch", help="Batch size B"),
    lr: Optional[float] = typer.Option(None, "--lr", help="Learning rate"),
    steps: Optional[int] = typer.Option(None, "--steps", help="Training steps T"),
    layers: Optional[int] = typer.Option(None, "--layers", help="Ansatz layers"),
    c2: Optional[float] = typer.Option(None, "--c2", help="Accountant constant c₂"),
    seed: Optional[int] = typer.Option(None, "--seed", help="Root seed"),
    out: Optional[Path] = typer.Option(None, "--out", help="Output directory"),
    workers: Optional[int] = typer.Option(
        None, "--workers", "-w", help="Worker processes for the grid"
    ),
):
    """Run an experiment; flags override values from the config file"""
    if shots is not None:
        try:
            shots_value: Optional[float] = parse_shots(shots)
        except ValueError as e:
            print_error(str(e), "Invalid Option")
            raise typer.Exit(code=1)
    else:
        shots_value = None

    # a flag replaces the matching grid axis as well as the single value
    overrides = {
        "dataset.name": dataset,
        "train.mode": mode,
        "grid.modes": [mode] if mode is not None else None,
        "privacy.epsilon": eps,
        "grid.epsilons": [eps] if eps is not None else None,
        "privacy.delta": delta,
        "privacy.beta": beta,
        "train.shots": shots_value,
        "grid.shots": [shots_value] if shots_value is not None else None,
        "train.alpha": alpha,
        "grid.alphas": [alpha] if alpha is not None else None,
        "train.batch_size": batch,
        "train.lr": lr,
        "train.steps": steps,
        "model.n_layers": layers,
        "privacy.c2": c2,
        "train.seed": seed,
        "grid.seeds": [seed] if seed is not None else None,
        "output.path": str(out) if out is not None else None,
    }
    config = load_experiment(config_file, overrides)
    settings = system_settings(workers)

    try:
        runner = ExperimentRunner(config, settings)
        with Progress(
            SpinnerColumn(),
            TextColumn("[progress.description]{task.description}"),
            transient=True,
            console=console,
        ) as progress:
            total = len(runner.cells)
            task = progress.add_task(description=f"Running 0/{total} cells...", total=None)
            done = []

            def on_cell_done(output: CellOutput) -> None:
                done.append(output)
                progress.update(task, description=f"Running {len(done)}/{total} cells...")

            outputs = runner.run(on_cell_done)
    except (OSError, ValueError) as e:
        print_error(str(e), "Run Failed")
        raise typer.Exit(code=1)

    console.print(results_table(outputs))
    console.print(
        Panel(
            f"[bold green]{len(outputs)} cell(s) finished[/bold green]\n"
            f"[bold blue]Results:[/bold blue] {config.output.path}",
            title="[green]✅ Experiment Complete[/green]",
            border_style="green",
        )
    )


if __name__ == "__main__":
    cli()
