"""
Dataset commands
"""

from pathlib import Path

import typer
from rich.console import Console
from rich.panel import Panel

from shotdp.data.datasets import gen_bars_stripes, gen_binary_blobs
from shotdp.sim.rng import RngStream

data_app = typer.Typer(name="data", help="Dataset commands", add_completion=True)

console = Console()

GENERATORS = ("bars_stripes", "binary_blobs")


@data_app.command(name="generate")
def generate_command(
    name: str = typer.Argument(..., help="bars_stripes or binary_blobs"),
    out: Path = typer.Option(..., "--out", "-o", help="Destination CSV file"),
    samples: int = typer.Option(1000, "--samples", "-n", help="Number of samples"),
    seed: int = typer.Option(0, "--seed", help="Root seed"),
    flip_prob: float = typer.Option(0.05, "--flip-prob", help="Blob bit-flip probability"),
    classes: int = typer.Option(2, "--classes", help="Blob classes (2 to 8)"),
    uniform_fraction: float = typer.Option(
        0.1, "--uniform-fraction", help="Share of all-0/all-1 grids"
    ),
    noise_std: float = typer.Option(0.0, "--noise-std", help="Gaussian pixel noise"),
):
    """Write a generated dataset to CSV"""
    if name not in GENERATORS:
        console.print(
            Panel(
                f"[bold red]Error:[/bold red] Unknown dataset '{name}', "
                f"choose one of {', '.join(GENERATORS)}",
                title="[red]❌ Invalid Dataset[/red]",
                border_style="red",
            )
        )
        raise typer.Exit(code=1)

    stream = RngStream(seed)
    try:
        if name == "bars_stripes":
            dataset = gen_bars_stripes(samples, stream, uniform_fraction, noise_std)
        else:
            dataset = gen_binary_blobs(samples, flip_prob, stream, classes)
        dataset.to_csv(out)
    except (OSError, ValueError) as e:
        console.print(
            Panel(
                f"[bold red]Error:[/bold red] {e}",
                title="[red]❌ Generation Failed[/red]",
                border_style="red",
            )
        )
        raise typer.Exit(code=1)

    counts = ", ".join(str(c) for c in dataset.class_counts())
    console.print(
        Panel(
            f"[bold green]{dataset.size} samples[/bold green] of {name} "
            f"(class counts {counts})\n"
            f"[bold blue]File:[/bold blue] {out}",
            title="[green]✅ Dataset Written[/green]",
            border_style="green",
        )
    )
