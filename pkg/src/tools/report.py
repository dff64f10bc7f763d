"""Console rendering for scenario and benchmark results."""

from typing import Any, Dict, Iterable, Optional

from rich.console import Console
from rich.panel import Panel
from rich.table import Table

console = Console()


def format_settings(values: Dict[str, Any], title: str = "Run") -> Panel:
    """Key/value panel for the parameters a run was started with."""
    table = Table(show_header=False, box=None)
    table.add_column("Key", style="blue")
    table.add_column("Value", style="white")
    for key, value in values.items():
        table.add_row(key, str(value))
    return Panel(table, title=title, border_style="blue")


def format_steps(steps: Iterable[Any]) -> Table:
    table = Table(title="Steps")
    table.add_column("#", justify="right", style="dim")
    table.add_column("Step", style="cyan")
    table.add_column("Outcome")
    for i, step in enumerate(steps):
        style = "green" if step.ok else "red"
        table.add_row(str(i), step.label, f"[{style}]{step.outcome}[/{style}]")
    return table


def format_scenario(report: Any) -> Panel:
    status = "[bold green]PASSED[/bold green]" if report.passed else "[bold red]FAILED[/bold red]"
    table = Table(show_header=False, box=None)
    table.add_column("Key", style="blue")
    table.add_column("Value", style="white")
    table.add_row("status", status)
    table.add_row("frames", str(report.frame_count))
    table.add_row("transcript", report.transcript_digest)
    if report.failure:
        table.add_row("failure", f"[red]{report.failure}[/red]")
    return Panel(table, title=f"Scenario {report.name}", border_style="green" if report.passed else "red")


def format_growth(summary: Any) -> Panel:
    table = Table(show_header=False, box=None)
    table.add_column("Key", style="blue")
    table.add_column("Value", style="white")
    table.add_row("backend", summary.backend)
    table.add_row("predicted per transfer", f"{summary.predicted_increment} B")
    table.add_row("measured increments", ", ".join(f"{i} B" for i in sorted(summary.increments)))
    table.add_row("constant overhead", f"{summary.overhead} B")
    table.add_row("size after first transfer", f"{summary.first_size} B")
    table.add_row("size after last transfer", f"{summary.last_size} B")
    table.add_row("reference", "[dim]about 1.2 kB per transfer with 128-byte elements[/dim]")
    return Panel(table, title="Growth", border_style="blue")


def format_timing(summary: Any, limit: Optional[int] = 10) -> Table:
    """Per-index min/max/mean table; long runs show the first and last rows."""
    table = Table(title=f"Verification time ({summary.backend})")
    table.add_column("Index", justify="right", style="cyan")
    table.add_column("Min (ms)", justify="right")
    table.add_column("Mean (ms)", justify="right")
    table.add_column("Max (ms)", justify="right")
    rows = summary.per_index
    if limit is not None and len(rows) > limit:
        half = limit // 2
        rows = rows[:half] + [None] + rows[-half:]
    for row in rows:
        if row is None:
            table.add_row("...", "", "", "")
            continue
        table.add_row(
            str(row.index),
            f"{row.min_ns / 1e6:.1f}",
            f"{row.mean_ns / 1e6:.1f}",
            f"{row.max_ns / 1e6:.1f}",
        )
    return table


def format_fit(summary: Any, host: Dict[str, Any]) -> Panel:
    table = Table(show_header=False, box=None)
    table.add_column("Key", style="blue")
    table.add_column("Value", style="white")
    table.add_row("slope", f"{summary.slope_ns / 1e6:.2f} ms per transfer")
    table.add_row("intercept", f"{summary.intercept_ns / 1e6:.2f} ms")
    table.add_row("r squared", f"{summary.r_squared:.4f}")
    for key, value in host.items():
        table.add_row(key, str(value))
    table.add_row(
        "reference",
        "[dim]165 ms at 1, 4545 ms at 50, +91 ms per transfer (128-byte element backend)[/dim]",
    )
    return Panel(table, title="Least-squares fit", border_style="blue")
