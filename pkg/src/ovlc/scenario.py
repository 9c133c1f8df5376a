"""Scenario files: TOML documents describing one sweep run.

Sections: [turbulence] (exactly one of a regime preset, explicit
alpha/beta, or physical structure-constant inputs), [geometry.sr] and
[geometry.rd] (per-hop link geometry), [noise] (environment overrides),
[relay] (spectral efficiency and per-hop SNR sources), [sweep] (axis
and grid), [sim] (sample count, seed, combining mode) and [report]
(output destination and formats).

Validation is total: any malformed document raises ScenarioError with
the offending section/key and, where the text allows it, the line.
"""

from __future__ import annotations

import math
import sys
from dataclasses import dataclass, fields
from pathlib import Path
from typing import NoReturn

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .channel import REGIME_PRESETS, LinkGeometry, TurbulenceParams
from .noise import NoiseEnvironment

__all__ = [
    "ScenarioError",
    "TurbulenceSpec",
    "RelaySettings",
    "SweepSettings",
    "SimSettings",
    "ReportSettings",
    "Scenario",
    "load_scenario",
    "parse_scenario",
]

_SECTIONS = ("turbulence", "geometry", "noise", "relay", "sweep", "sim", "report")
_AXES = ("snr_db", "distance_m")
_MODES = ("exact", "min", "harmonic")
_FORMATS = ("csv", "json")


class ScenarioError(ValueError):
    """A scenario document failed validation; message names key and line."""


def _line_of(text: str, token: str) -> int | None:
    for i, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0]
        if stripped.strip().startswith(token):
            return i
    return None


def _fail(text: str, section: str, key: str | None, problem: str) -> NoReturn:
    token = key if key is not None else f"[{section}]"
    where = f"[{section}]" + (f" {key}" if key else "")
    line = _line_of(text, token)
    suffix = f" (line {line})" if line is not None else ""
    raise ScenarioError(f"{where}: {problem}{suffix}")


@dataclass(frozen=True)
class TurbulenceSpec:
    """How shape parameters are obtained; resolved per hop at sweep time."""

    preset: str | None = None
    alpha: float | None = None
    beta: float | None = None
    cn2: float | None = None
    wavelength: float | None = None
    aperture: float | None = None
    beta_xi: float = 1.0

    @property
    def kind(self) -> str:
        if self.preset is not None:
            return "preset"
        if self.alpha is not None:
            return "explicit"
        return "physical"

    def resolve(self, path_length: float) -> TurbulenceParams:
        """Materialize shape parameters for a hop of the given length."""
        if self.preset is not None:
            return REGIME_PRESETS[self.preset]
        if self.alpha is not None and self.beta is not None:
            return TurbulenceParams(self.alpha, self.beta)
        return TurbulenceParams.from_physics(
            self.cn2, self.wavelength, self.aperture, path_length, self.beta_xi
        )


@dataclass(frozen=True)
class RelaySettings:
    spectral_efficiency: float = 1.0
    snr_sr_db: float | None = None
    snr_rd_db: float | None = None
    derive_from_physics: bool = False
    optical_power_sr: float = 1.0
    optical_power_rd: float = 1.0


@dataclass(frozen=True)
class SweepSettings:
    axis: str
    grid: tuple[float, ...]


@dataclass(frozen=True)
class SimSettings:
    sample_count: int = 1_000_000
    master_seed: int = 20240901
    mode: str = "min"


@dataclass(frozen=True)
class ReportSettings:
    out_dir: str = "results"
    formats: tuple[str, ...] = ("csv",)
    discrepancy: bool = True


@dataclass(frozen=True)
class Scenario:
    turbulence: TurbulenceSpec
    geometry_sr: LinkGeometry
    geometry_rd: LinkGeometry
    noise_env: NoiseEnvironment
    relay: RelaySettings
    sweep: SweepSettings
    sim: SimSettings
    report: ReportSettings


def load_scenario(path: "str | Path") -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def parse_scenario(text: str) -> Scenario:
    try:
        doc = _toml.loads(text)
    except _toml.TOMLDecodeError as exc:
        raise ScenarioError(f"not a valid TOML document: {exc}") from exc
    for section in doc:
        if section not in _SECTIONS:
            _fail(text, section, None, "unknown section")
    turbulence = _parse_turbulence(text, doc.get("turbulence"))
    geometry_sr, geometry_rd = _parse_geometry(text, doc.get("geometry", {}))
    noise_env = _parse_noise(text, doc.get("noise", {}))
    relay = _parse_relay(text, doc.get("relay", {}))
    sweep = _parse_sweep(text, doc.get("sweep"))
    sim = _parse_sim(text, doc.get("sim", {}))
    report = _parse_report(text, doc.get("report", {}))
    if sweep.axis == "distance_m" and relay.snr_sr_db is None and not relay.derive_from_physics:
        _fail(
            text,
            "relay",
            None,
            "distance sweeps need the source-hop SNR: set snr_sr_db or derive_from_physics",
        )
    return Scenario(turbulence, geometry_sr, geometry_rd, noise_env, relay, sweep, sim, report)


def _require_number(text: str, section: str, key: str, value, positive: bool = False) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        _fail(text, section, key, f"expected a number, got {value!r}")
    v = float(value)
    if positive and not v > 0.0:
        _fail(text, section, key, f"must be strictly positive, got {value!r}")
    if math.isnan(v) or math.isinf(v):
        _fail(text, section, key, "must be finite")
    return v


def _parse_turbulence(text: str, block) -> TurbulenceSpec:
    if block is None:
        _fail(text, "turbulence", None, "section is required")
    if not isinstance(block, dict):
        _fail(text, "turbulence", None, "must be a table")
    known = {"preset", "alpha", "beta", "cn2", "wavelength", "aperture", "beta_xi"}
    for key in block:
        if key not in known:
            _fail(text, "turbulence", key, "unknown key")
    groups = [
        "preset" in block,
        "alpha" in block or "beta" in block,
        any(k in block for k in ("cn2", "wavelength", "aperture")),
    ]
    if sum(groups) != 1:
        _fail(
            text,
            "turbulence",
            None,
            "exactly one of: preset, explicit alpha/beta, physical cn2/wavelength/aperture",
        )
    if groups[0]:
        preset = block["preset"]
        if preset not in REGIME_PRESETS:
            _fail(text, "turbulence", "preset", f"unknown preset {preset!r}; choose from {sorted(REGIME_PRESETS)}")
        return TurbulenceSpec(preset=preset)
    if groups[1]:
        if "alpha" not in block or "beta" not in block:
            _fail(text, "turbulence", None, "explicit turbulence needs both alpha and beta")
        return TurbulenceSpec(
            alpha=_require_number(text, "turbulence", "alpha", block["alpha"], positive=True),
            beta=_require_number(text, "turbulence", "beta", block["beta"], positive=True),
        )
    for key in ("cn2", "wavelength", "aperture"):
        if key not in block:
            _fail(text, "turbulence", key, "physical turbulence needs cn2, wavelength and aperture")
    return TurbulenceSpec(
        cn2=_require_number(text, "turbulence", "cn2", block["cn2"], positive=True),
        wavelength=_require_number(text, "turbulence", "wavelength", block["wavelength"], positive=True),
        aperture=_require_number(text, "turbulence", "aperture", block["aperture"], positive=True),
        beta_xi=_require_number(text, "turbulence", "beta_xi", block.get("beta_xi", 1.0), positive=True),
    )


_GEOMETRY_FIELDS = {f.name for f in fields(LinkGeometry)}


def _parse_one_geometry(text: str, hop: str, block) -> LinkGeometry:
    if not isinstance(block, dict):
        _fail(text, f"geometry.{hop}", None, "must be a table")
    kwargs = {}
    for key, value in block.items():
        if key not in _GEOMETRY_FIELDS:
            _fail(text, f"geometry.{hop}", key, "unknown key")
        if key == "distance_exponent":
            if value not in (1, 2):
                _fail(text, f"geometry.{hop}", key, "must be 1 or 2")
            kwargs[key] = int(value)
        else:
            kwargs[key] = _require_number(text, f"geometry.{hop}", key, value)
    try:
        return LinkGeometry(**kwargs)
    except ValueError as exc:
        _fail(text, f"geometry.{hop}", None, str(exc))


def _parse_geometry(text: str, block) -> tuple[LinkGeometry, LinkGeometry]:
    if not isinstance(block, dict):
        _fail(text, "geometry", None, "must be a table")
    for key in block:
        if key not in ("sr", "rd"):
            _fail(text, "geometry", key, "geometry has per-hop subtables [geometry.sr] and [geometry.rd]")
    sr = _parse_one_geometry(text, "sr", block.get("sr", {}))
    rd = _parse_one_geometry(text, "rd", block.get("rd", {}))
    return sr, rd


_NOISE_FIELDS = {f.name for f in fields(NoiseEnvironment)}


def _parse_noise(text: str, block) -> NoiseEnvironment:
    if not isinstance(block, dict):
        _fail(text, "noise", None, "must be a table")
    kwargs = {}
    for key, value in block.items():
        if key not in _NOISE_FIELDS:
            _fail(text, "noise", key, "unknown key")
        if key == "spectral_max_window":
            if not (isinstance(value, list) and len(value) == 2):
                _fail(text, "noise", key, "must be a two-element list [lo_um, hi_um]")
            kwargs[key] = (
                _require_number(text, "noise", key, value[0], positive=True),
                _require_number(text, "noise", key, value[1], positive=True),
            )
        else:
            kwargs[key] = _require_number(text, "noise", key, value)
    try:
        return NoiseEnvironment(**kwargs)
    except ValueError as exc:
        _fail(text, "noise", None, str(exc))


def _parse_relay(text: str, block) -> RelaySettings:
    if not isinstance(block, dict):
        _fail(text, "relay", None, "must be a table")
    known = {
        "spectral_efficiency",
        "snr_sr_db",
        "snr_rd_db",
        "derive_from_physics",
        "optical_power_sr",
        "optical_power_rd",
    }
    for key in block:
        if key not in known:
            _fail(text, "relay", key, "unknown key")
    derive = block.get("derive_from_physics", False)
    if not isinstance(derive, bool):
        _fail(text, "relay", "derive_from_physics", "must be a boolean")
    return RelaySettings(
        spectral_efficiency=_require_number(
            text, "relay", "spectral_efficiency", block.get("spectral_efficiency", 1.0), positive=True
        ),
        snr_sr_db=(
            _require_number(text, "relay", "snr_sr_db", block["snr_sr_db"])
            if "snr_sr_db" in block
            else None
        ),
        snr_rd_db=(
            _require_number(text, "relay", "snr_rd_db", block["snr_rd_db"])
            if "snr_rd_db" in block
            else None
        ),
        derive_from_physics=derive,
        optical_power_sr=_require_number(
            text, "relay", "optical_power_sr", block.get("optical_power_sr", 1.0), positive=True
        ),
        optical_power_rd=_require_number(
            text, "relay", "optical_power_rd", block.get("optical_power_rd", 1.0), positive=True
        ),
    )


def _parse_sweep(text: str, block) -> SweepSettings:
    if block is None:
        _fail(text, "sweep", None, "section is required")
    if not isinstance(block, dict):
        _fail(text, "sweep", None, "must be a table")
    for key in block:
        if key not in ("axis", "grid"):
            _fail(text, "sweep", key, "unknown key")
    axis = block.get("axis")
    if axis not in _AXES:
        _fail(text, "sweep", "axis", f"must be one of {_AXES}, got {axis!r}")
    grid = block.get("grid")
    if not isinstance(grid, list) or not grid:
        _fail(text, "sweep", "grid", "must be a nonempty list of numbers")
    values = tuple(_require_number(text, "sweep", "grid", v) for v in grid)
    if any(b <= a for a, b in zip(values, values[1:])):
        _fail(text, "sweep", "grid", "must be strictly increasing")
    if axis == "distance_m" and values[0] <= 0.0:
        _fail(text, "sweep", "grid", "distances must be strictly positive")
    return SweepSettings(axis, values)


def _parse_sim(text: str, block) -> SimSettings:
    if not isinstance(block, dict):
        _fail(text, "sim", None, "must be a table")
    for key in block:
        if key not in ("sample_count", "master_seed", "mode"):
            _fail(text, "sim", key, "unknown key")
    samples = block.get("sample_count", 1_000_000)
    if isinstance(samples, bool) or not isinstance(samples, int) or samples < 1:
        _fail(text, "sim", "sample_count", f"must be a positive integer, got {samples!r}")
    seed = block.get("master_seed", 20240901)
    if isinstance(seed, bool) or not isinstance(seed, int) or not 0 <= seed < 2**64:
        _fail(text, "sim", "master_seed", f"must be an unsigned 64-bit integer, got {seed!r}")
    mode = block.get("mode", "min")
    if mode not in _MODES:
        _fail(text, "sim", "mode", f"must be one of {_MODES}, got {mode!r}")
    return SimSettings(samples, seed, mode)


def _parse_report(text: str, block) -> ReportSettings:
    if not isinstance(block, dict):
        _fail(text, "report", None, "must be a table")
    for key in block:
        if key not in ("out_dir", "formats", "discrepancy"):
            _fail(text, "report", key, "unknown key")
    out_dir = block.get("out_dir", "results")
    if not isinstance(out_dir, str) or not out_dir:
        _fail(text, "report", "out_dir", "must be a nonempty string")
    formats = block.get("formats", ["csv"])
    if not isinstance(formats, list) or not formats:
        _fail(text, "report", "formats", "must be a nonempty list")
    for fmt in formats:
        if fmt not in _FORMATS:
            _fail(text, "report", "formats", f"must contain only {_FORMATS}, got {fmt!r}")
    discrepancy = block.get("discrepancy", True)
    if not isinstance(discrepancy, bool):
        _fail(text, "report", "discrepancy", "must be a boolean")
    return ReportSettings(out_dir, tuple(dict.fromkeys(formats)), discrepancy)
