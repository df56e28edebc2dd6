"""
Benchmark study commands
"""

from pathlib import Path
from typing import List, Optional

import typer
from rich.box import ROUNDED
from rich.console import Console
from rich.panel import Panel
from rich.progress import Progress, SpinnerColumn, TextColumn
from rich.table import Table

from shotdp.experiments.studies import (
    StudyResult,
    accuracy_table_study,
    adaptive_vs_fixed_study,
    hyperparam_study,
    noise_reduction_study,
    variance_study,
)
from shotdp.training.config import parse_shots
from shotdp.utils.serialization import format_cell

study_app = typer.Typer(name="study", help="Benchmark studies", add_completion=True)

console = Console()


def _base_config(config_file: Optional[Path], steps: Optional[int]):
    # imported here to avoid a cycle with the main module
    from shotdp.cli.main import load_experiment

    return load_experiment(config_file, {"train.steps": steps})


def _settings(workers: Optional[int]):
    from shotdp.cli.main import system_settings

    return system_settings(workers)


def _show(result: StudyResult, out: Path) -> None:
    """Print a study's rows and save them"""
    table = Table(
        show_header=True, header_style="bold blue", border_style="cyan", box=ROUNDED
    )
    for column in result.columns:
        table.add_column(column, justify="right")
    for row in result.rows:
        table.add_row(*[format_cell(row.get(c), 6) for c in result.columns])
    console.print(table)

    csv_path, json_path = result.save(out)
    console.print(
        Panel(
            f"[bold blue]CSV:[/bold blue] {csv_path}\n[bold blue]JSON:[/bold blue] {json_path}",
            title=f"[green]✅ Study {result.name}[/green]",
            border_style="green",
        )
    )


def _spinner(description: str) -> Progress:
    progress = Progress(
        SpinnerColumn(),
        TextColumn("[progress.description]{task.description}"),
        transient=True,
        console=console,
    )
    progress.add_task(description=description, total=None)
    return progress


@study_app.command(name="variances")
def variances_command(
    samples: int = typer.Option(1000, "--samples", help="Random circuits"),
    alpha: Optional[List[float]] = typer.Option(
        None, "--alpha", help="Depolarizing strength (repeatable)"
    ),
    layers: int = typer.Option(1, "--layers", help="Ansatz layers"),
    seed: int = typer.Option(0, "--seed", help="Root seed"),
    out: Path = typer.Option(Path("results/studies"), "--out", help="Output directory"),
):
    """Single-shot variances of shifted circuits against the depolarizing floor"""
    _settings(None)
    with _spinner("Computing variances..."):
        result = variance_study(
            n_samples=samples,
            alphas=tuple(alpha) if alpha else (0.0, 0.1, 0.2),
            n_layers=layers,
            seed=seed,
        )
    _show(result, out)
    violations = sum(row["violations"] for row in result.rows)
    if violations:
        console.print(f"[bold red]{violations} floor violation(s)[/bold red]")
        raise typer.Exit(code=1)


@study_app.command(name="noise-reduction")
def noise_reduction_command(
    shots: Optional[List[int]] = typer.Option(None, "--shots", help="Shot count (repeatable)"),
    batch: Optional[List[int]] = typer.Option(None, "--batch", help="Batch size (repeatable)"),
    batches: int = typer.Option(20, "--batches", help="Random batches per setting"),
    eps: float = typer.Option(1.0, "--eps", help="Privacy budget ε"),
    delta: float = typer.Option(1e-3, "--delta", help="Privacy budget δ"),
    beta: float = typer.Option(1e-5, "--beta", help="Failure probability β"),
    c2: float = typer.Option(1.0, "--c2", help="Accountant constant c₂"),
    steps: int = typer.Option(30, "--steps", help="Training steps T"),
    seed: int = typer.Option(0, "--seed", help="Root seed"),
    out: Path = typer.Option(Path("results/studies"), "--out", help="Output directory"),
):
    """Artificial noise saved by the adaptive calibration"""
    _settings(None)
    try:
        with _spinner("Estimating batch variances..."):
            result = noise_reduction_study(
                shots=tuple(shots) if shots else (100, 1000, 10000),
                batch_sizes=tuple(batch) if batch else (64, 128, 256, 512),
                n_batches=batches,
                epsilon=eps,
                delta=delta,
                beta=beta,
                c2=c2,
                steps=steps,
                seed=seed,
            )
    except ValueError as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        raise typer.Exit(code=1)
    _show(result, out)


@study_app.command(name="accuracy-table")
def accuracy_table_command(
    config_file: Optional[Path] = typer.Argument(None, help="Base experiment config"),
    eps: Optional[List[float]] = typer.Option(None, "--eps", help="ε (repeatable)"),
    shots: Optional[List[str]] = typer.Option(None, "--shots", help="Shots or 'inf' (repeatable)"),
    seeds: int = typer.Option(5, "--seeds", help="Number of seeds"),
    steps: Optional[int] = typer.Option(None, "--steps", help="Training steps T"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Worker processes"),
    out: Path = typer.Option(Path("results/accuracy-table"), "--out", help="Output directory"),
):
    """Test accuracy over privacy budgets and shot counts"""
    base = _base_config(config_file, steps)
    settings = _settings(workers)
    try:
        shot_values = tuple(parse_shots(s) for s in shots) if shots else None
        with _spinner("Training grid..."):
            result = accuracy_table_study(
                base,
                epsilons=tuple(eps) if eps else (0.1, 0.5, 1.0),
                shots=shot_values or (1000, 10000, 100000, float("inf")),
                seeds=tuple(range(seeds)),
                out_dir=out,
                system_config=settings,
            )
    except (OSError, ValueError) as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        raise typer.Exit(code=1)
    _show(result, out)


@study_app.command(name="adaptive-vs-fixed")
def adaptive_vs_fixed_command(
    config_file: Optional[Path] = typer.Argument(None, help="Base experiment config"),
    alpha: Optional[List[float]] = typer.Option(None, "--alpha", help="α (repeatable)"),
    eps: float = typer.Option(1.0, "--eps", help="Privacy budget ε"),
    shots: int = typer.Option(1000, "--shots", help="Shots per shifted circuit"),
    seeds: int = typer.Option(5, "--seeds", help="Number of seeds"),
    steps: Optional[int] = typer.Option(None, "--steps", help="Training steps T"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Worker processes"),
    out: Path = typer.Option(Path("results/adaptive-vs-fixed"), "--out", help="Output directory"),
):
    """Adaptive against fixed calibration across depolarizing strengths"""
    base = _base_config(config_file, steps)
    settings = _settings(workers)
    try:
        with _spinner("Training grid..."):
            result = adaptive_vs_fixed_study(
                base,
                alphas=tuple(alpha) if alpha else (0.0, 0.1, 0.2),
                epsilon=eps,
                n_shots=shots,
                seeds=tuple(range(seeds)),
                out_dir=out,
                system_config=settings,
            )
    except (OSError, ValueError) as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        raise typer.Exit(code=1)
    _show(result, out)


@study_app.command(name="hyperparams")
def hyperparams_command(
    config_file: Optional[Path] = typer.Argument(None, help="Base experiment config"),
    batch: Optional[List[int]] = typer.Option(None, "--batch", help="Batch size (repeatable)"),
    lr: Optional[List[float]] = typer.Option(None, "--lr", help="Learning rate (repeatable)"),
    eps: Optional[List[float]] = typer.Option(None, "--eps", help="ε (repeatable)"),
    seeds: int = typer.Option(1, "--seeds", help="Number of seeds"),
    steps: Optional[int] = typer.Option(None, "--steps", help="Training steps T"),
    workers: Optional[int] = typer.Option(None, "--workers", "-w", help="Worker processes"),
    out: Path = typer.Option(Path("results/hyperparams"), "--out", help="Output directory"),
):
    """Batch size, learning rate and ε sweep with exact expectations"""
    base = _base_config(config_file, steps)
    settings = _settings(workers)
    try:
        with _spinner("Training grid..."):
            result = hyperparam_study(
                base,
                batch_sizes=tuple(batch) if batch else (32, 64, 128, 256, 512),
                learning_rates=tuple(lr) if lr else (0.2, 0.1, 0.05, 0.01, 0.005),
                epsilons=tuple(eps) if eps else (0.1, 0.5, 1.0),
                seeds=tuple(range(seeds)),
                out_dir=out,
                system_config=settings,
            )
    except (OSError, ValueError) as e:
        console.print(f"[bold red]Error:[/bold red] {e}")
        raise typer.Exit(code=1)
    _show(result, out)
