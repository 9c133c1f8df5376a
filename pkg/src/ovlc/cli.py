"""Command-line entry points: run a sweep, list presets, validate a file.

The only environment knob is OVLC_WORKERS, which sets the worker count
for Monte Carlo block execution; it never changes results, only wall
time.
"""

from __future__ import annotations

import os
import sys
from dataclasses import replace
from pathlib import Path

import click

from .channel import REGIME_PRESETS
from .scenario import ScenarioError, load_scenario
from .sweep import emit_report, run_sweep

__all__ = ["main"]


def _worker_count() -> int:
    raw = os.environ.get("OVLC_WORKERS", "1")
    try:
        count = int(raw)
    except ValueError:
        raise click.ClickException(f"OVLC_WORKERS must be an integer, got {raw!r}")
    if count < 1:
        raise click.ClickException("OVLC_WORKERS must be >= 1")
    return count


@click.group()
def main() -> None:
    """Dual-hop outdoor visible-light link sweeps: outage, capacity, oracles."""


@main.command()
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--out", "out_dir", type=click.Path(file_okay=False, path_type=Path), default=None,
              help="Output directory (default: the scenario's [report] out_dir).")
@click.option("--format", "fmt", type=click.Choice(["csv", "json"]), default=None,
              help="Restrict output to one format (default: the scenario's [report] formats).")
@click.option("--seed", type=click.IntRange(0, 2**64 - 1), default=None,
              help="Override [sim] master_seed.")
@click.option("--samples", type=click.IntRange(1), default=None,
              help="Override [sim] sample_count.")
@click.option("--mode", type=click.Choice(["exact", "min", "harmonic"]), default=None,
              help="Override [sim] mode for the Monte Carlo columns.")
def run(scenario_file: Path, out_dir: Path | None, fmt: str | None,
        seed: int | None, samples: int | None, mode: str | None) -> None:
    """Run the sweep described by SCENARIO_FILE and write its reports."""
    try:
        scenario = load_scenario(scenario_file)
    except ScenarioError as exc:
        raise click.ClickException(str(exc))
    sim = scenario.sim
    if seed is not None:
        sim = replace(sim, master_seed=seed)
    if samples is not None:
        sim = replace(sim, sample_count=samples)
    if mode is not None:
        sim = replace(sim, mode=mode)
    scenario = replace(scenario, sim=sim)

    result = run_sweep(scenario, worker_count=_worker_count())
    destination = out_dir if out_dir is not None else Path(scenario.report.out_dir)
    formats = (fmt,) if fmt is not None else scenario.report.formats
    written = emit_report(result, destination, formats)

    click.echo(f"{len(result.rows)} grid points on axis {result.axis}")
    flagged = sum(1 for row in result.rows if row.status)
    if flagged:
        click.echo(f"{flagged} row(s) carry status notes")
    for path in written:
        click.echo(f"wrote {path}")


@main.command()
def presets() -> None:
    """List the turbulence regime presets."""
    click.echo(f"{'name':<10} {'alpha':>6} {'beta':>6}")
    for name, params in REGIME_PRESETS.items():
        click.echo(f"{name:<10} {params.alpha:>6} {params.beta:>6}")


@main.command()
@click.argument("scenario_file", type=click.Path(exists=True, dir_okay=False, path_type=Path))
def validate(scenario_file: Path) -> None:
    """Check a scenario file without running it."""
    try:
        scenario = load_scenario(scenario_file)
    except ScenarioError as exc:
        click.echo(f"invalid: {exc}", err=True)
        sys.exit(1)
    sweep = scenario.sweep
    click.echo(
        f"ok: {scenario.turbulence.kind} turbulence, axis {sweep.axis}, "
        f"{len(sweep.grid)} grid points, {scenario.sim.sample_count} samples/point"
    )
