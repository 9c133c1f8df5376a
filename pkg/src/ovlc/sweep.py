"""Sweep orchestration and report emission.

``run_sweep`` walks the grid of a scenario and evaluates, per point,
the closed-form and reference outage, the closed-form and quadrature
capacity, and the Monte Carlo estimates of both. Numeric failures mark
the affected cell and the row status; they never abort the sweep. One
master seed drives every grid point (common random numbers along the
sweep), and blocks within a point follow the montecarlo substream
scheme, so output files are byte-identical for identical inputs
regardless of worker count.

``emit_report`` writes the fixed-schema CSV/JSON sweep table and the
discrepancy table comparing closed forms against references.
"""

from __future__ import annotations

import csv
import json
import warnings
from dataclasses import asdict, dataclass, replace
from pathlib import Path
from typing import Iterable

from . import analytic
from .analytic import DiscrepancyRow, RelayScenario, discrepancy_rows
from .channel import AvgSnr, TurbulenceParams, WeakTurbulenceWarning
from .montecarlo import SimConfig, estimate_capacity, estimate_outage
from .noise import link_budget
from .scenario import Scenario
from .specfun import PoleProximityError, SpecfunError

__all__ = [
    "SCHEMA_VERSION",
    "SWEEP_COLUMNS",
    "DISCREPANCY_COLUMNS",
    "SweepRow",
    "SweepResult",
    "run_sweep",
    "emit_report",
]

SCHEMA_VERSION = 1

SWEEP_COLUMNS = (
    "sweep_value",
    "alpha",
    "beta",
    "snr_sr_db",
    "snr_rd_db",
    "outage_paper",
    "outage_ref",
    "outage_mc",
    "outage_mc_se",
    "cap_paper",
    "cap_quad",
    "cap_mc",
    "cap_mc_se",
    "status",
)

DISCREPANCY_COLUMNS = (
    "gamma",
    "regime",
    "metric",
    "paper_value",
    "reference_value",
    "abs_dev",
    "rel_dev",
)


@dataclass(frozen=True)
class SweepRow:
    sweep_value: float
    alpha: float
    beta: float
    snr_sr_db: float
    snr_rd_db: float
    outage_paper: "float | None"
    outage_ref: "float | None"
    outage_mc: "float | None"
    outage_mc_se: "float | None"
    cap_paper: "float | str | None"  # "POLE" marks a cosecant pole
    cap_quad: "float | None"
    cap_mc: "float | None"
    cap_mc_se: "float | None"
    status: str


@dataclass(frozen=True)
class SweepResult:
    axis: str
    rows: tuple[SweepRow, ...]
    discrepancies: tuple[DiscrepancyRow, ...]


def _resolve_turbulence(scenario: Scenario, hop: str, distance: float) -> tuple[TurbulenceParams, list[str]]:
    notes: list[str] = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter("always", WeakTurbulenceWarning)
        params = scenario.turbulence.resolve(distance)
    if caught:
        notes.append(f"{hop}: weak-turbulence degenerate shape parameters")
    return params, notes


def _hop_snr(scenario: Scenario, hop: str) -> AvgSnr:
    relay = scenario.relay
    if hop == "sr":
        if relay.snr_sr_db is not None:
            return AvgSnr.from_db(relay.snr_sr_db)
        geom, power = scenario.geometry_sr, relay.optical_power_sr
    else:
        if relay.snr_rd_db is not None:
            return AvgSnr.from_db(relay.snr_rd_db)
        geom, power = scenario.geometry_rd, relay.optical_power_rd
    return link_budget(geom, scenario.noise_env, power).avg_snr


def _point_scenario(scenario: Scenario, value: float) -> tuple[RelayScenario, list[str]]:
    """Scenario for one grid point plus any status notes it generated."""
    notes: list[str] = []
    if scenario.sweep.axis == "snr_db":
        snr = AvgSnr.from_db(value)
        sr_params, n1 = _resolve_turbulence(scenario, "sr", scenario.geometry_sr.distance)
        rd_params, n2 = _resolve_turbulence(scenario, "rd", scenario.geometry_rd.distance)
        notes += n1 + n2
        scen = RelayScenario(sr_params, rd_params, snr, snr, scenario.relay.spectral_efficiency)
    else:  # distance_m: the relay-to-destination hop moves out to `value`
        geom_rd = replace(scenario.geometry_rd, distance=value)
        sr_params, n1 = _resolve_turbulence(scenario, "sr", scenario.geometry_sr.distance)
        rd_params, n2 = _resolve_turbulence(scenario, "rd", value)
        notes += n1 + n2
        snr_sr = _hop_snr(scenario, "sr")
        snr_rd = link_budget(geom_rd, scenario.noise_env, scenario.relay.optical_power_rd).avg_snr
        scen = RelayScenario(sr_params, rd_params, snr_sr, snr_rd, scenario.relay.spectral_efficiency)
    return scen, notes


def _try(label: str, fn, notes: list[str]):
    try:
        return fn()
    except PoleProximityError:
        raise
    except (SpecfunError, OverflowError, ValueError) as exc:
        notes.append(f"{label}: {exc.__class__.__name__}")
        return None


def run_sweep(scenario: Scenario, worker_count: int = 1) -> SweepResult:
    """Evaluate every grid point; cells fail independently, rows always emit."""
    rows: list[SweepRow] = []
    for value in scenario.sweep.grid:
        notes: list[str] = []
        scen, notes_scen = _point_scenario(scenario, value)
        notes += notes_scen
        matched = True
        try:
            scen.matched_shape()
        except ValueError:
            matched = False
            notes.append("closed forms skipped: per-hop shape parameters differ")

        outage_ref = _try("outage_ref", lambda: analytic.outage_probability(scen, form="reference"), notes)
        cap_quad = _try("cap_quad", lambda: analytic.ergodic_capacity_quadrature(scen), notes)

        outage_paper = None
        cap_paper: "float | str | None" = None
        if matched:
            outage_paper = _try(
                "outage_paper", lambda: analytic.outage_probability(scen, form="closed_form"), notes
            )
            try:
                cap_paper = _try("cap_paper", lambda: analytic.ergodic_capacity_closed_form(scen), notes)
            except PoleProximityError:
                cap_paper = "POLE"
                notes.append("cap_paper: cosecant pole at this alpha+beta")

        config = SimConfig(scen, scenario.sim.sample_count, scenario.sim.master_seed, worker_count)
        mc_out = _try("outage_mc", lambda: estimate_outage(config, mode=scenario.sim.mode), notes)
        mc_cap = _try("cap_mc", lambda: estimate_capacity(config, mode=scenario.sim.mode), notes)

        rows.append(
            SweepRow(
                sweep_value=value,
                alpha=scen.sr_turbulence.alpha,
                beta=scen.sr_turbulence.beta,
                snr_sr_db=scen.avg_snr_sr.db,
                snr_rd_db=scen.avg_snr_rd.db,
                outage_paper=outage_paper,
                outage_ref=outage_ref,
                outage_mc=mc_out.estimate if mc_out else None,
                outage_mc_se=mc_out.std_error if mc_out else None,
                cap_paper=cap_paper,
                cap_quad=cap_quad,
                cap_mc=mc_cap.estimate if mc_cap else None,
                cap_mc_se=mc_cap.std_error if mc_cap else None,
                status="; ".join(notes),
            )
        )
    discrepancies = tuple(discrepancy_rows()) if scenario.report.discrepancy else ()
    return SweepResult(scenario.sweep.axis, tuple(rows), discrepancies)


def _cell(value) -> str:
    if value is None:
        return "NA"
    if isinstance(value, str):
        return value
    return repr(float(value))


def emit_report(result: SweepResult, out_dir: "str | Path", formats: Iterable[str] = ("csv",)) -> list[Path]:
    """Write sweep (and discrepancy) tables; returns the created paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written: list[Path] = []
    formats = tuple(formats)
    if "csv" in formats:
        path = out / "sweep.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(f"# ovlc sweep report schema_version={SCHEMA_VERSION} axis={result.axis}\n")
            writer = csv.writer(fh)
            writer.writerow(SWEEP_COLUMNS)
            for row in result.rows:
                writer.writerow([_cell(getattr(row, col)) for col in SWEEP_COLUMNS])
        written.append(path)
    if "json" in formats:
        path = out / "sweep.json"
        payload = {
            "schema_version": SCHEMA_VERSION,
            "axis": result.axis,
            "rows": [asdict(row) for row in result.rows],
        }
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
        written.append(path)
    if result.discrepancies:
        path = out / "discrepancy.csv"
        with path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(f"# ovlc discrepancy report schema_version={SCHEMA_VERSION}\n")
            writer = csv.writer(fh)
            writer.writerow(DISCREPANCY_COLUMNS)
            for drow in result.discrepancies:
                writer.writerow(["" if v is None else _cell(v) for v in (
                    drow.gamma,
                    drow.regime,
                    drow.metric,
                    drow.paper_value,
                    drow.reference_value,
                    drow.abs_dev,
                    drow.rel_dev,
                )])
        written.append(path)
    return written
