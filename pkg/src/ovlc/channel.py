"""Deterministic path gain and Gamma-Gamma turbulence statistics.

The optical line-of-sight gain follows the Lambertian emission pattern;
irradiance fluctuations follow the Gamma-Gamma law, whose shape
parameters can either be given directly (regime presets) or built from
spherical-wave Rytov parameters.

Two evaluators exist for the per-link SNR distribution function: the
closed-form expression transcribed verbatim (``gg_cdf_snr_closed_form``)
and a quadrature reference that integrates the density
(``gg_cdf_snr_reference``). They do not agree in general; the analytic
layer records the gap in a machine-readable discrepancy table instead
of hiding it behind a tolerance.
"""

from __future__ import annotations

import math
import warnings
from bisect import bisect_right
from dataclasses import dataclass
from typing import NamedTuple

from .specfun import (
    DomainError,
    QuadratureSpec,
    RangeOverflowError,
    bessel_k,
    gamma_fn,
    integrate,
)

__all__ = [
    "AvgSnr",
    "LinkGeometry",
    "PhysicalOrigin",
    "TurbulenceParams",
    "AlphaBetaResult",
    "WeakTurbulenceWarning",
    "REGIME_PRESETS",
    "lambertian_gain",
    "alpha_beta_from_physics",
    "gg_pdf_h",
    "gg_pdf_snr",
    "gg_cdf_snr_closed_form",
    "gg_cdf_snr_reference",
    "LinkSnrCdf",
]


class WeakTurbulenceWarning(UserWarning):
    """Scintillation so weak that the shape parameters degenerate to huge values."""


@dataclass(frozen=True)
class LinkGeometry:
    """Geometry and receiver optics of one LED-to-photodetector hop."""

    lambertian_order: float = 1.0
    pd_area: float = 1e-4  # m^2
    distance: float = 10.0  # m
    irradiance_angle: float = 0.0  # rad
    incidence_angle: float = 0.0  # rad
    filter_gain: float = 1.0
    concentrator_gain: float = 1.0
    fov: float = math.pi / 3  # rad, half-angle
    # 1 reproduces the printed 1/d path-loss law; 2 selects the
    # conventional inverse-square alternative for sensitivity studies.
    distance_exponent: int = 1

    def __post_init__(self):
        if not self.pd_area > 0.0:
            raise DomainError("pd_area must be positive")
        if not self.distance > 0.0:
            raise DomainError("distance must be positive")
        if not 0.0 <= self.fov <= math.pi / 2:
            raise DomainError("fov must lie in [0, pi/2]")
        if self.filter_gain < 0.0 or self.concentrator_gain < 0.0:
            raise DomainError("filter_gain and concentrator_gain must be nonnegative")
        if not self.lambertian_order > 0.0:
            raise DomainError("lambertian_order must be positive")
        if self.distance_exponent not in (1, 2):
            raise DomainError("distance_exponent must be 1 or 2")


def lambertian_gain(geom: LinkGeometry) -> float:
    """Line-of-sight DC gain of one hop; exactly 0 outside the field of view."""
    if geom.incidence_angle > geom.fov:
        return 0.0
    cos_phi = math.cos(geom.irradiance_angle)
    if cos_phi <= 0.0:
        return 0.0
    rolloff = cos_phi ** geom.lambertian_order * math.cos(geom.incidence_angle)
    return (
        (geom.lambertian_order + 1.0)
        * geom.pd_area
        / (2.0 * math.pi * geom.distance ** geom.distance_exponent)
        * rolloff
        * geom.filter_gain
        * geom.concentrator_gain
    )


class AlphaBetaResult(NamedTuple):
    alpha: float
    beta: float
    rytov_variance: float
    rho: float


def alpha_beta_from_physics(
    structure_constant: float,
    wavelength: float,
    aperture: float,
    path_length: float,
    beta_xi: float = 1.0,
) -> AlphaBetaResult:
    """Spherical-wave shape parameters from the refractive-index structure constant.

    The undetermined wavenumber in the rho expression is taken as the
    optical wavenumber 2*pi/wavelength (the only one in scope).
    ``beta_xi`` is the extra model constant appearing squared in the
    beta denominator; it has no published value, so it stays exposed
    with a neutral default of 1.

    Degenerately weak scintillation produces huge but finite alpha/beta;
    that case is flagged with WeakTurbulenceWarning rather than hidden.
    Overflow (either in the exponentials or of the outputs themselves)
    raises RangeOverflowError.
    """
    for name, v in (
        ("structure_constant", structure_constant),
        ("wavelength", wavelength),
        ("aperture", aperture),
        ("path_length", path_length),
    ):
        if not v > 0.0:
            raise DomainError(f"{name} must be strictly positive, got {v!r}")
    kappa = 0.5 * path_length ** (11.0 / 6.0) * structure_constant * (2.0 * math.pi / wavelength)
    wavenumber = 2.0 * math.pi / wavelength
    rho = math.sqrt(2.0 * math.pi * wavenumber * aperture**2 / (4.0 * wavelength) * path_length)
    k125 = kappa ** 2.4
    arg_a = 0.49 * kappa**2 / (1.0 + 0.18 * rho**2 + 0.56 * k125) ** (7.0 / 6.0)
    arg_b = (
        0.51
        * kappa**2
        * (1.0 + 0.69 * k125) ** (-5.0 / 6.0)
        / (1.0 + 0.9 * rho**2 + 0.62 * beta_xi**2 * k125) ** (5.0 / 6.0)
    )
    if arg_a > 700.0 or arg_b > 700.0:
        raise RangeOverflowError("exponential argument overflows in shape-parameter formulas")
    alpha = 1.0 / math.expm1(arg_a)
    beta = 1.0 / math.expm1(arg_b)
    if math.isinf(alpha) or math.isinf(beta):
        raise RangeOverflowError("shape parameters exceed double range (scintillation ~ 0)")
    if arg_a < 1e-9 or arg_b < 1e-9:
        warnings.warn(
            "scintillation is negligibly weak; alpha/beta are degenerate large values",
            WeakTurbulenceWarning,
            stacklevel=2,
        )
    return AlphaBetaResult(alpha, beta, kappa, rho)


@dataclass(frozen=True)
class PhysicalOrigin:
    """Optional physical provenance of a pair of shape parameters."""

    structure_constant: float  # C_n^2, m^(-2/3)
    wavelength: float  # m
    aperture: float  # m
    path_length: float  # m
    beta_xi: float = 1.0


@dataclass(frozen=True)
class TurbulenceParams:
    """Gamma-Gamma shape parameters, optionally tied to their physical origin."""

    alpha: float
    beta: float
    physical: PhysicalOrigin | None = None

    def __post_init__(self):
        if not self.alpha > 0.0 or not self.beta > 0.0:
            raise DomainError("alpha and beta must be strictly positive")
        if self.physical is not None:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", WeakTurbulenceWarning)
                derived = alpha_beta_from_physics(
                    self.physical.structure_constant,
                    self.physical.wavelength,
                    self.physical.aperture,
                    self.physical.path_length,
                    self.physical.beta_xi,
                )
            if not math.isclose(self.alpha, derived.alpha, rel_tol=1e-9) or not math.isclose(
                self.beta, derived.beta, rel_tol=1e-9
            ):
                raise DomainError("stored alpha/beta do not match their physical provenance")

    @classmethod
    def from_physics(
        cls,
        structure_constant: float,
        wavelength: float,
        aperture: float,
        path_length: float,
        beta_xi: float = 1.0,
    ) -> "TurbulenceParams":
        derived = alpha_beta_from_physics(structure_constant, wavelength, aperture, path_length, beta_xi)
        return cls(
            derived.alpha,
            derived.beta,
            PhysicalOrigin(structure_constant, wavelength, aperture, path_length, beta_xi),
        )


REGIME_PRESETS: dict[str, TurbulenceParams] = {
    "weak": TurbulenceParams(8.1, 4.0),
    "moderate": TurbulenceParams(4.2, 3.0),
    "strong": TurbulenceParams(2.2, 2.0),
}


@dataclass(frozen=True)
class AvgSnr:
    """Average electrical SNR of one hop (dimensionless, linear scale)."""

    value: float

    def __post_init__(self):
        if not self.value > 0.0:
            raise DomainError("average SNR must be strictly positive")

    @classmethod
    def from_db(cls, db: float) -> "AvgSnr":
        return cls(10.0 ** (db / 10.0))

    @property
    def db(self) -> float:
        return 10.0 * math.log10(self.value)


def _snr_value(avg_snr: "AvgSnr | float") -> float:
    if isinstance(avg_snr, AvgSnr):
        return avg_snr.value
    value = float(avg_snr)
    if not value > 0.0:
        raise DomainError("average SNR must be strictly positive")
    return value


def gg_pdf_h(h: float, params: TurbulenceParams) -> float:
    """Density of the unit-mean Gamma-Gamma fading coefficient."""
    a, b = params.alpha, params.beta
    if h < 0.0 or math.isnan(h):
        raise DomainError(f"fading coefficient must be nonnegative, got {h!r}")
    if h == 0.0:
        return 0.0 if a + b > 2.0 else math.inf
    k = bessel_k(a - b, 2.0 * math.sqrt(a * b * h))
    if k == 0.0:
        return 0.0
    prefactor = 2.0 * (a * b) ** ((a + b) / 2.0) / (gamma_fn(a) * gamma_fn(b))
    return prefactor * h ** ((a + b) / 2.0 - 1.0) * k


def gg_pdf_snr(gamma: float, params: TurbulenceParams, avg_snr: "AvgSnr | float") -> float:
    """Density of the instantaneous electrical SNR gamma = avg_snr * h**2."""
    a, b = params.alpha, params.beta
    gbar = _snr_value(avg_snr)
    if gamma < 0.0 or math.isnan(gamma):
        raise DomainError(f"SNR must be nonnegative, got {gamma!r}")
    if gamma == 0.0:
        return 0.0 if a + b > 4.0 else math.inf
    ratio = a * b / math.sqrt(gbar)
    k = bessel_k(a - b, 2.0 * math.sqrt(ratio * math.sqrt(gamma)))
    if k == 0.0:
        return 0.0
    prefactor = ratio ** ((a + b) / 2.0) / (gamma_fn(a) * gamma_fn(b))
    return prefactor * gamma ** ((a + b) / 4.0 - 1.0) * k


def gg_cdf_snr_closed_form(gamma: float, params: TurbulenceParams, avg_snr: "AvgSnr | float") -> float:
    """Per-link SNR distribution function, closed form transcribed verbatim.

    The value is returned without clamping: where it departs from a true
    CDF (it does), the departure belongs in the discrepancy report, not
    in this function.
    """
    a, b = params.alpha, params.beta
    gbar = _snr_value(avg_snr)
    if gamma < 0.0 or math.isnan(gamma):
        raise DomainError(f"SNR must be nonnegative, got {gamma!r}")
    if gamma == 0.0:
        return 0.0 if a + b > 4.0 else math.inf
    k = bessel_k(a - b, 2.0 * math.sqrt(math.sqrt(a * b * gamma) / math.sqrt(gbar)))
    if k == 0.0:
        return 0.0
    prefactor = (
        4.0
        * (a * b / math.sqrt(gbar)) ** ((a + b) / 2.0)
        / ((a + b) * gamma_fn(a) * gamma_fn(b))
    )
    return prefactor * gamma ** ((a + b) / 4.0 - 1.0) * k


class LinkSnrCdf:
    """Reference per-link SNR CDF by adaptive quadrature of the density.

    Evaluations are cached as an increasing knot sequence so that a
    sweep over many thresholds integrates each stretch of the axis only
    once. The stretch touching zero runs under a power substitution
    that smooths the density's fractional-power behaviour there; long
    stretches run on a log axis so no scale is starved of quadrature
    nodes.
    """

    def __init__(
        self,
        params: TurbulenceParams,
        avg_snr: "AvgSnr | float",
        quadrature: QuadratureSpec | None = None,
    ):
        self._params = params
        self._gbar = _snr_value(avg_snr)
        self._quad = quadrature or QuadratureSpec(
            abs_tolerance=1e-12, rel_tolerance=1e-10, max_subdivisions=512
        )
        self._knots = [0.0]
        self._cdf = [0.0]
        self._error = 0.0
        # near zero the density is a series in fractional powers that
        # starts at gamma**(min(alpha,beta)/2 - 1); u = gamma**(1/q)
        # turns both the integrable singularity and the quartic-root
        # cusps of the Bessel factor into smooth powers of u
        shape = min(params.alpha, params.beta) / 2.0
        self._subst_power = max(4, math.ceil(3.0 / shape))

    @property
    def accumulated_error(self) -> float:
        return self._error

    def _pdf(self, gamma: float) -> float:
        return gg_pdf_snr(gamma, self._params, self._gbar)

    def _segment(self, lo: float, hi: float) -> float:
        if lo == 0.0:
            # resolve the head on its natural scale, then hand the rest
            # to the log-spaced path so distant thresholds cannot starve
            # the quadrature of nodes where the mass actually sits
            head = min(hi, self._gbar)
            value = self._head_segment(head)
            if hi > head:
                value += self._log_segment(head, hi)
            return value
        if hi / lo > 16.0:
            return self._log_segment(lo, hi)
        value, err = integrate(self._pdf, lo, hi, self._quad)
        self._error += err
        return value

    def _head_segment(self, hi: float) -> float:
        q = float(self._subst_power)

        def transformed(u: float) -> float:
            return self._pdf(u**q) * q * u ** (q - 1.0)

        value, err = integrate(transformed, 0.0, hi ** (1.0 / q), self._quad)
        self._error += err
        return value

    def _log_segment(self, lo: float, hi: float) -> float:
        def transformed(u: float) -> float:
            x = lo * math.exp(u)
            return self._pdf(x) * x

        value, err = integrate(transformed, 0.0, math.log(hi / lo), self._quad)
        self._error += err
        return value

    def __call__(self, gamma: float) -> float:
        if gamma < 0.0 or math.isnan(gamma):
            raise DomainError(f"SNR must be nonnegative, got {gamma!r}")
        if gamma == 0.0:
            return 0.0
        i = bisect_right(self._knots, gamma)
        if self._knots[i - 1] == gamma:
            return min(1.0, self._cdf[i - 1])
        value = self._cdf[i - 1] + self._segment(self._knots[i - 1], gamma)
        self._knots.insert(i, gamma)
        self._cdf.insert(i, value)
        return min(1.0, value)

    def survival(self, gamma: float) -> float:
        """1 - CDF, floored at zero against accumulated quadrature error."""
        if gamma <= 0.0:
            return 1.0
        self(gamma)
        i = bisect_right(self._knots, gamma)
        return max(0.0, 1.0 - self._cdf[i - 1])


def gg_cdf_snr_reference(
    gamma: float,
    params: TurbulenceParams,
    avg_snr: "AvgSnr | float",
    quadrature: QuadratureSpec | None = None,
) -> float:
    """One-shot quadrature CDF of the per-link SNR; in [0, 1] by construction."""
    return LinkSnrCdf(params, avg_snr, quadrature)(gamma)
