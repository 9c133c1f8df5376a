"""Shot-noise and thermal-noise budget for the photodetector front end.

Daylight enters through a blackbody model of the solar spectrum; the
fraction landing inside the receiver's optical bandpass drives the
ambient term of the shot noise. The thermal part is the usual
feedback-resistor plus FET-channel pair. Together they produce the
noise variance that turns a deterministic optical path gain into an
average electrical SNR.

Default constants are declared configuration, not asserted physics:
every regression value downstream is pinned to this exact snapshot.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable

from .channel import AvgSnr, LinkGeometry, lambertian_gain
from .specfun import (
    DomainError,
    QuadratureSpec,
    RangeOverflowError,
    integrate,
)

__all__ = [
    "NoiseEnvironment",
    "LinkBudget",
    "blackbody_irradiance",
    "spectral_fraction",
    "shot_variance",
    "thermal_variance",
    "total_noise_variance",
    "average_snr",
    "link_budget",
]


@dataclass(frozen=True)
class NoiseEnvironment:
    """All constants of the shot/thermal noise model.

    Spectral limits are in micrometres and the in-band integral runs in
    micrometres as well, so ``peak_spectral_irradiance`` is read as a
    per-micrometre spectral peak (W/m^2/um).
    """

    electron_charge: float = 1.602e-19  # C
    noise_bandwidth: float = 50e6  # Hz
    rect_bandwidth_factor: float = 0.562
    peak_filter_transmission: float = 1.0
    concentrator_refractive_index: float = 1.5
    fov_halfangle: float = math.pi / 3  # rad, argument of the sin^2 ambient term
    spectral_lower: float = 0.38  # um
    spectral_upper: float = 0.78  # um
    peak_spectral_irradiance: float = 1000.0  # W/m^2/um
    sun_temperature: float = 5778.0  # K
    planck: float = 6.626e-34  # J s
    boltzmann: float = 1.381e-23  # J/K
    light_speed: float = 2.998e8  # m/s
    absolute_temperature: float = 298.0  # K
    open_loop_gain: float = 10.0
    capacitance_per_area: float = 1.12e-6  # F/m^2
    fet_noise_factor: float = 1.5
    fet_transconductance: float = 30e-3  # S
    raised_cosine_factor: float = 0.0868
    pd_area: float = 1e-4  # m^2, shared with LinkGeometry
    conversion_factor: float = 1.0  # optoelectronic conversion g
    concentrator_gain: float = 1.0  # T_c as seen by the ambient shot term
    # None: normalize the blackbody spectrum over [spectral_lower,
    # spectral_upper]; otherwise over this window (um), e.g. (0.2, 2.0).
    spectral_max_window: tuple[float, float] | None = None

    def __post_init__(self):
        positives = (
            "electron_charge",
            "noise_bandwidth",
            "sun_temperature",
            "planck",
            "boltzmann",
            "light_speed",
            "absolute_temperature",
            "open_loop_gain",
            "capacitance_per_area",
            "fet_transconductance",
            "pd_area",
        )
        for name in positives:
            if not getattr(self, name) > 0.0:
                raise DomainError(f"{name} must be strictly positive")
        if not self.spectral_lower < self.spectral_upper:
            raise DomainError("spectral_lower must be below spectral_upper")


def blackbody_irradiance(wavelength: float, sun_temperature: float, env: NoiseEnvironment | None = None) -> float:
    """Spectral irradiance of the blackbody daylight model at one wavelength (m).

    Raises RangeOverflowError instead of saturating when the Planck
    exponential overflows (wavelengths far below the thermal peak).
    """
    if not wavelength > 0.0 or not sun_temperature > 0.0:
        raise DomainError("wavelength and sun_temperature must be strictly positive")
    env = env or _DEFAULT_ENV
    exponent = env.planck * env.light_speed / (wavelength * env.boltzmann * sun_temperature)
    if exponent > 700.0:
        raise RangeOverflowError(
            f"blackbody exponential overflows at wavelength {wavelength!r} m"
        )
    return 2.0 * math.pi * env.planck * env.light_speed**2 / (wavelength**5 * math.expm1(exponent))


_DEFAULT_ENV = NoiseEnvironment()

_SPECTRAL_QUAD = QuadratureSpec(abs_tolerance=1e-9, rel_tolerance=1e-10, max_subdivisions=512)


def _peak_over_window(irradiance: Callable[[float], float], lo_um: float, hi_um: float) -> float:
    """Maximum of a unimodal spectrum over a wavelength window, by ternary search."""
    lo, hi = lo_um, hi_um
    for _ in range(200):
        m1 = lo + (hi - lo) / 3.0
        m2 = hi - (hi - lo) / 3.0
        if irradiance(m1) < irradiance(m2):
            lo = m1
        else:
            hi = m2
        if hi - lo < 1e-12:
            break
    mid = 0.5 * (lo + hi)
    return max(irradiance(lo_um), irradiance(hi_um), irradiance(mid))


def spectral_fraction(
    env: NoiseEnvironment,
    irradiance: Callable[[float], float] | None = None,
) -> float:
    """In-band daylight irradiance: peak-normalized spectrum integrated over the filter band.

    ``irradiance`` maps a wavelength in metres to spectral irradiance and
    defaults to the blackbody model; it is injectable so the integral can
    be checked against trivially integrable spectra.
    """
    if irradiance is None:
        return _spectral_fraction_cached(env)
    return _spectral_fraction_impl(env, irradiance)


@lru_cache(maxsize=128)
def _spectral_fraction_cached(env: NoiseEnvironment) -> float:
    return _spectral_fraction_impl(
        env, lambda lam: blackbody_irradiance(lam, env.sun_temperature, env)
    )


def _spectral_fraction_impl(env: NoiseEnvironment, irradiance: Callable[[float], float]) -> float:
    window = env.spectral_max_window or (env.spectral_lower, env.spectral_upper)
    peak = _peak_over_window(lambda l_um: irradiance(l_um * 1e-6), window[0], window[1])
    if peak <= 0.0:
        raise DomainError("spectral peak must be positive")

    def integrand(l_um: float) -> float:
        return env.peak_spectral_irradiance * irradiance(l_um * 1e-6) / peak

    value, _ = integrate(integrand, env.spectral_lower, env.spectral_upper, _SPECTRAL_QUAD)
    return value


def shot_variance(
    env: NoiseEnvironment,
    optical_power: float,
    channel_gain: float,
    pd_area: float,
    in_band_irradiance: float | None = None,
) -> float:
    """Ambient-plus-signal shot-noise variance.

    ``in_band_irradiance`` short-circuits the spectral integral when the
    caller already holds it (sweeps reuse one value across grid points).
    """
    if optical_power < 0.0 or channel_gain < 0.0 or pd_area < 0.0:
        raise DomainError("optical_power, channel_gain and pd_area must be nonnegative")
    xi = spectral_fraction(env) if in_band_irradiance is None else in_band_irradiance
    ambient = (
        env.rect_bandwidth_factor
        * xi
        * env.peak_filter_transmission
        * pd_area
        * env.concentrator_gain
        * math.sin(env.fov_halfangle) ** 2
    )
    return (
        2.0
        * env.conversion_factor
        * env.electron_charge
        * env.noise_bandwidth
        * (optical_power * channel_gain + ambient)
    )


def thermal_variance(env: NoiseEnvironment) -> float:
    """Feedback-resistor plus FET-channel thermal noise variance."""
    k_t = env.boltzmann * env.absolute_temperature
    feedback = (
        8.0
        * math.pi
        * k_t
        / env.open_loop_gain
        * env.capacitance_per_area
        * env.pd_area
        * env.rect_bandwidth_factor**2
    )
    fet = (
        16.0
        * math.pi**2
        * k_t
        * env.fet_noise_factor
        / env.fet_transconductance
        * env.capacitance_per_area**2
        * env.pd_area**2
        * env.raised_cosine_factor
        * env.rect_bandwidth_factor**3
    )
    return feedback + fet


def total_noise_variance(
    env: NoiseEnvironment,
    optical_power: float,
    channel_gain: float,
    pd_area: float,
    in_band_irradiance: float | None = None,
) -> float:
    """Sum of the shot and thermal contributions (strictly positive)."""
    return shot_variance(env, optical_power, channel_gain, pd_area, in_band_irradiance) + thermal_variance(env)


def average_snr(
    conversion_factor: float,
    path_gain: float,
    optical_power: float,
    noise_variance: float,
) -> AvgSnr:
    """Average electrical SNR (g * h * P)^2 / sigma^2 of one hop."""
    if not noise_variance > 0.0:
        raise DomainError(f"noise variance must be strictly positive, got {noise_variance!r}")
    return AvgSnr((conversion_factor * path_gain * optical_power) ** 2 / noise_variance)


@dataclass(frozen=True)
class LinkBudget:
    """Assembled per-hop budget: geometry -> noise -> average SNR."""

    path_gain: float
    in_band_irradiance: float
    shot: float
    thermal: float
    noise_variance: float
    avg_snr: AvgSnr


def link_budget(
    geom: LinkGeometry,
    env: NoiseEnvironment,
    optical_power: float = 1.0,
) -> LinkBudget:
    """Build the average-SNR budget of one hop.

    The shot-noise term uses the deterministic path gain as the channel
    coefficient (the turbulence factor has unit mean), and the
    photodetector area is taken from the geometry on both noise paths.
    """
    env = replace(env, pd_area=geom.pd_area)
    h = lambertian_gain(geom)
    xi = spectral_fraction(env)
    shot = shot_variance(env, optical_power, h, geom.pd_area, in_band_irradiance=xi)
    thermal = thermal_variance(env)
    sigma2 = shot + thermal
    snr = average_snr(env.conversion_factor, h, optical_power, sigma2)
    return LinkBudget(h, xi, shot, thermal, sigma2, snr)
