"""End-to-end SNR statistics and the outage/capacity performance metrics.

The relayed link is source -> relay -> destination with two receive
branches on the last hop combined by selection. Every metric exists in
two forms:

* ``*_closed_form`` evaluates the printed closed-form expressions
  verbatim, including their known algebraic quirks, and propagates
  pole/overflow statuses instead of masking them;
* the reference path (``e2e_cdf_reference``, ``outage_probability`` in
  reference form, ``ergodic_capacity_quadrature``) builds the exact
  distribution of the min-bound end-to-end SNR from quadrature CDFs.

``discrepancy_rows`` evaluates both sides over a standard grid and
returns the signed gaps as data; nothing in this module asserts that
the closed forms agree with the references.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Sequence

from .channel import (
    REGIME_PRESETS,
    AvgSnr,
    LinkSnrCdf,
    TurbulenceParams,
    gg_cdf_snr_closed_form,
    _snr_value,
)
from .specfun import (
    DomainError,
    QuadratureSpec,
    RangeOverflowError,
    SpecfunError,
    bessel_k,
    csc_guarded,
    gamma_fn,
    integrate,
)

__all__ = [
    "RelayScenario",
    "CapacityConstants",
    "E2eReferenceCdf",
    "e2e_snr_exact",
    "e2e_snr_bound",
    "sc_combine_cdf",
    "combine_link_cdfs",
    "e2e_cdf_closed_form",
    "e2e_cdf_reference",
    "e2e_pdf_closed_form",
    "outage_probability",
    "ergodic_capacity_quadrature",
    "ergodic_capacity_closed_form",
    "capacity_constants",
    "DiscrepancyRow",
    "discrepancy_rows",
    "DISCREPANCY_GAMMAS",
    "DISCREPANCY_SNRS",
]


@dataclass(frozen=True)
class RelayScenario:
    """One dual-hop scenario: turbulence and average SNR per hop.

    Both destination branches share ``rd_turbulence``/``avg_snr_rd``
    unless the optional second-branch fields are set; the closed forms
    are printed for the shared case and refuse anything else.
    """

    sr_turbulence: TurbulenceParams
    rd_turbulence: TurbulenceParams
    avg_snr_sr: AvgSnr
    avg_snr_rd: AvgSnr
    spectral_efficiency: float = 1.0
    rd2_turbulence: TurbulenceParams | None = None
    avg_snr_rd2: AvgSnr | None = None

    def __post_init__(self):
        if not self.spectral_efficiency > 0.0:
            raise DomainError("spectral_efficiency must be strictly positive")

    @property
    def outage_threshold(self) -> float:
        """SNR below which the target spectral efficiency is unreachable."""
        return 2.0 ** (2.0 * self.spectral_efficiency) - 1.0

    def branch2(self) -> tuple[TurbulenceParams, AvgSnr]:
        return (
            self.rd2_turbulence or self.rd_turbulence,
            self.avg_snr_rd2 or self.avg_snr_rd,
        )

    def with_avg_snr(self, avg_snr: AvgSnr) -> "RelayScenario":
        """Same scenario with both hops (and the second branch) at one SNR."""
        return replace(self, avg_snr_sr=avg_snr, avg_snr_rd=avg_snr, avg_snr_rd2=None)

    def matched_shape(self) -> TurbulenceParams:
        """The single turbulence parameter set the closed forms require."""
        p2, s2 = self.branch2()
        same = (
            self.sr_turbulence.alpha == self.rd_turbulence.alpha == p2.alpha
            and self.sr_turbulence.beta == self.rd_turbulence.beta == p2.beta
        )
        if not same:
            raise DomainError(
                "closed-form evaluators require identical shape parameters on every hop"
            )
        if s2.value != self.avg_snr_rd.value:
            raise DomainError("closed-form evaluators require both destination branches at one SNR")
        return self.sr_turbulence


def scenario_from_preset(
    regime: str,
    avg_snr: "AvgSnr | float",
    spectral_efficiency: float = 1.0,
) -> RelayScenario:
    """Convenience: preset turbulence, both hops at one average SNR."""
    params = REGIME_PRESETS[regime]
    snr = avg_snr if isinstance(avg_snr, AvgSnr) else AvgSnr(float(avg_snr))
    return RelayScenario(params, params, snr, snr, spectral_efficiency)


# ---------------------------------------------------------------------------
# end-to-end SNR combining


def e2e_snr_exact(gamma_sr: float, gamma_rd: float) -> float:
    """Relayed end-to-end SNR gamma_sr*gamma_rd/(gamma_sr + gamma_rd + 1)."""
    if gamma_sr < 0.0 or gamma_rd < 0.0:
        raise DomainError("SNRs must be nonnegative")
    return gamma_sr * gamma_rd / (gamma_sr + gamma_rd + 1.0)


def e2e_snr_bound(gamma_sr: float, gamma_rd: float, mode: str = "harmonic") -> float:
    """Upper bound on the end-to-end SNR.

    ``harmonic`` drops the +1 of the exact form; ``min`` is the coarser
    min{gamma_sr, gamma_rd} bound whose CDF factors into the product/sum
    combination used by the reference distribution.
    """
    if gamma_sr < 0.0 or gamma_rd < 0.0:
        raise DomainError("SNRs must be nonnegative")
    if mode == "min":
        return min(gamma_sr, gamma_rd)
    if mode == "harmonic":
        if gamma_sr == 0.0 and gamma_rd == 0.0:
            raise DomainError("harmonic bound undefined at (0, 0)")
        return gamma_sr * gamma_rd / (gamma_sr + gamma_rd)
    raise DomainError(f"unknown bound mode {mode!r}")


def sc_combine_cdf(
    cdf1: Callable[[float], float], cdf2: Callable[[float], float]
) -> Callable[[float], float]:
    """CDF of the selection-combined (max) SNR of two independent branches."""

    def combined(gamma: float) -> float:
        return cdf1(gamma) * cdf2(gamma)

    return combined


def combine_link_cdfs(f_sr: float, f_rd1: float, f_rd2: float) -> float:
    """Min-bound combination F_sr + F_rd1*F_rd2 - F_sr*F_rd1*F_rd2."""
    branch = f_rd1 * f_rd2
    return f_sr + branch - f_sr * branch


# ---------------------------------------------------------------------------
# closed forms, verbatim


def _pow(base: float, exponent: float) -> float:
    try:
        return base**exponent
    except OverflowError as exc:
        raise RangeOverflowError(f"{base!r} ** {exponent!r} exceeds double range") from exc


def e2e_cdf_closed_form(gamma: float, scen: RelayScenario) -> float:
    """Closed-form end-to-end SNR distribution function, transcribed verbatim.

    The three terms carry coefficients 4, 16, -64 with SNR powers
    (a+b)/4 - 1, (a+b) and 3(a+b)/4; the middle and last powers are not
    the algebraic expansion of the per-link closed form, and the value
    is not clamped to [0, 1]. Gaps against the reference CDF are
    recorded by discrepancy_rows.
    """
    params = scen.matched_shape()
    a, b = params.alpha, params.beta
    s = a + b
    if gamma < 0.0 or math.isnan(gamma):
        raise DomainError(f"SNR must be nonnegative, got {gamma!r}")
    if gamma == 0.0:
        return 0.0 if s > 4.0 else math.inf
    gsr = scen.avg_snr_sr.value
    grd = scen.avg_snr_rd.value
    ga, gb = gamma_fn(a), gamma_fn(b)
    k_sr = bessel_k(a - b, 2.0 * math.sqrt(math.sqrt(a * b * gamma) / math.sqrt(gsr)))
    k_rd = bessel_k(a - b, 2.0 * math.sqrt(math.sqrt(a * b * gamma) / math.sqrt(grd)))
    t1 = 0.0
    if k_sr != 0.0:
        t1 = 4.0 * _pow(gamma, s / 4.0 - 1.0) / (s * ga * gb) * _pow(a * b / math.sqrt(gsr), s / 2.0) * k_sr
    t2 = 0.0
    if k_rd != 0.0:
        t2 = (
            16.0
            * _pow(gamma, s)
            / (s**2 * ga**2 * gb**2)
            * _pow(a * b / math.sqrt(grd), s)
            * k_rd**2
        )
    t3 = 0.0
    if k_sr != 0.0 and k_rd != 0.0:
        t3 = (
            64.0
            * _pow(gamma, 3.0 * s / 4.0)
            / (s**3 * ga**3 * gb**3)
            * _pow(a * b / math.sqrt(gsr), s / 2.0)
            * k_sr
            * _pow(a * b / math.sqrt(grd), s)
            * k_rd**2
        )
    return t1 + t2 - t3


def e2e_pdf_closed_form(gamma: float, scen: RelayScenario) -> float:
    """Closed-form end-to-end SNR density, verbatim (1, 8, -48 terms)."""
    params = scen.matched_shape()
    a, b = params.alpha, params.beta
    s = a + b
    if not gamma > 0.0:
        raise DomainError(f"density requires gamma > 0, got {gamma!r}")
    gsr = scen.avg_snr_sr.value
    grd = scen.avg_snr_rd.value
    ga, gb = gamma_fn(a), gamma_fn(b)
    k_sr = bessel_k(a - b, 2.0 * math.sqrt(math.sqrt(a * b * gamma) / math.sqrt(gsr)))
    k_rd = bessel_k(a - b, 2.0 * math.sqrt(math.sqrt(a * b * gamma) / math.sqrt(grd)))
    u1 = 0.0
    if k_sr != 0.0:
        u1 = _pow(gamma, s / 4.0 - 1.0) / (ga * gb) * _pow(a * b / math.sqrt(gsr), s / 2.0) * k_sr
    u2 = 0.0
    if k_rd != 0.0:
        u2 = (
            8.0
            * _pow(gamma, s - 2.0)
            / (s * ga**2 * gb**2)
            * _pow(a * b / math.sqrt(grd), s)
            * k_rd**2
        )
    u3 = 0.0
    if k_sr != 0.0 and k_rd != 0.0:
        u3 = (
            48.0
            * _pow(gamma, 3.0 * s / 4.0 - 1.0)
            / (s**2 * ga**3 * gb**3)
            * _pow(a * b / math.sqrt(gsr), s / 2.0)
            * k_sr
            * _pow(a * b / math.sqrt(grd), s)
            * k_rd**2
        )
    return u1 + u2 - u3


# ---------------------------------------------------------------------------
# reference path


class E2eReferenceCdf:
    """Exact CDF of min{gamma_sr, max(gamma_rd1, gamma_rd2)} from quadrature.

    Wraps one cached per-link CDF per distinct branch; a true CDF
    (monotone, [0, 1]) by construction.
    """

    def __init__(self, scen: RelayScenario, quadrature: QuadratureSpec | None = None):
        self._sr = LinkSnrCdf(scen.sr_turbulence, scen.avg_snr_sr, quadrature)
        self._rd1 = LinkSnrCdf(scen.rd_turbulence, scen.avg_snr_rd, quadrature)
        p2, s2 = scen.branch2()
        shared = p2 is scen.rd_turbulence and s2 is scen.avg_snr_rd
        self._rd2 = self._rd1 if shared else LinkSnrCdf(p2, s2, quadrature)

    def __call__(self, gamma: float) -> float:
        # the survival-product form of the min-bound combination keeps
        # the value monotone and inside [0, 1] even at one-ulp level
        return 1.0 - self.survival(gamma)

    def survival(self, gamma: float) -> float:
        """(1 - F_sr)(1 - F_rd1 F_rd2), floored at zero."""
        branch = self._rd1(gamma) * self._rd2(gamma)
        return self._sr.survival(gamma) * max(0.0, 1.0 - branch)


def e2e_cdf_reference(
    gamma: float, scen: RelayScenario, quadrature: QuadratureSpec | None = None
) -> float:
    """One-shot reference end-to-end CDF value."""
    return E2eReferenceCdf(scen, quadrature)(gamma)


def outage_probability(
    scen: RelayScenario,
    avg_snr: "AvgSnr | float | None" = None,
    form: str = "reference",
) -> float:
    """Probability that the end-to-end SNR misses the spectral-efficiency target.

    ``avg_snr`` optionally pins both hops to one sweep value. ``form``
    selects the reference CDF (default) or the printed closed form.
    """
    if avg_snr is not None:
        snr = avg_snr if isinstance(avg_snr, AvgSnr) else AvgSnr(_snr_value(avg_snr))
        scen = scen.with_avg_snr(snr)
    threshold = scen.outage_threshold
    if form == "reference":
        return e2e_cdf_reference(threshold, scen)
    if form == "closed_form":
        return e2e_cdf_closed_form(threshold, scen)
    raise DomainError(f"unknown outage form {form!r}")


_CAPACITY_QUAD = QuadratureSpec(abs_tolerance=1e-9, rel_tolerance=1e-8, max_subdivisions=2000)


def ergodic_capacity_quadrature(
    scen: RelayScenario,
    tail_mass: float = 1e-9,
) -> float:
    """Ergodic capacity (bit/s/Hz) of the min-bound end-to-end SNR.

    Integrates the survival form of the log expectation,
    (1/ln 2) * int_0^inf (1 - F(g)) / (1 + g) dg, truncated where the
    survival drops below ``tail_mass``; the neglected tail is bounded by
    log2(1 + g_max) * tail-mass, far below the quadrature tolerance of
    any use here.
    """
    ref = E2eReferenceCdf(scen)
    g_max = max(scen.avg_snr_sr.value, scen.avg_snr_rd.value, 1.0)
    for _ in range(80):
        if ref.survival(g_max) < tail_mass:
            break
        g_max *= 2.0
    else:
        raise DomainError("survival function does not decay; cannot truncate the capacity integral")

    # the survival mass sits at the scale of the weaker hop: resolve
    # that head directly, then walk the rest of the axis in log space
    # so no scale between head and g_max is starved of nodes
    head_hi = min(g_max, min(scen.avg_snr_sr.value, scen.avg_snr_rd.value))
    head, _ = integrate(lambda g: ref.survival(g) / (1.0 + g), 0.0, head_hi, _CAPACITY_QUAD)
    tail = 0.0
    if g_max > head_hi:

        def transformed(u: float) -> float:
            g = head_hi * math.exp(u)
            return ref.survival(g) * g / (1.0 + g)

        tail, _ = integrate(transformed, 0.0, math.log(g_max / head_hi), _CAPACITY_QUAD)
    return max(0.0, (head + tail) / math.log(2.0))


@dataclass(frozen=True)
class CapacityConstants:
    """Prefactors and Bessel-argument seeds of the closed-form capacity."""

    P: float
    Q: float
    R: float
    A: float
    B: float


def capacity_constants(scen: RelayScenario) -> CapacityConstants:
    """The five printed constants, recomputed from (alpha, beta, SNRs) verbatim."""
    params = scen.matched_shape()
    a, b = params.alpha, params.beta
    s = a + b
    gsr = scen.avg_snr_sr.value
    grd = scen.avg_snr_rd.value
    ga, gb = gamma_fn(a), gamma_fn(b)
    sr_ratio = _pow(a * b / math.sqrt(gsr), s / 2.0)
    rd_ratio = _pow(a * b / math.sqrt(grd), s)
    return CapacityConstants(
        P=4.0 * sr_ratio / (s * ga * gb),
        Q=16.0 * rd_ratio / (s**3 * ga**2 * gb**2),
        R=64.0 * sr_ratio * rd_ratio / (s**3 * ga**3 * gb**3),
        A=2.0 * math.sqrt(math.sqrt(a * b) / math.sqrt(gsr)),
        B=2.0 * math.sqrt(math.sqrt(a * b) / math.sqrt(grd)),
    )


def ergodic_capacity_closed_form(
    scen: RelayScenario,
    x: float = 1.0,
    pole_epsilon: float = 1e-9,
) -> float:
    """Closed-form ergodic capacity, transcribed verbatim.

    The printed expression leaves the variable inside the quartic-root
    Bessel arguments undefined; it is exposed as ``x`` with default 1 so
    the Bessel factors act as constants. Cosecant arguments within
    ``pole_epsilon`` of a multiple of pi raise PoleProximityError: there
    the formula is numerically meaningless (e.g. alpha + beta = 4).
    """
    params = scen.matched_shape()
    a, b = params.alpha, params.beta
    s = a + b
    c = capacity_constants(scen)
    k_a = bessel_k(a - b, (c.A * x) ** 0.25)
    k_b = bessel_k(a - b, (c.B * x) ** 0.25)
    csc_3s4 = csc_guarded(3.0 * s * math.pi / 4.0, pole_epsilon)
    csc_s2 = csc_guarded(s * math.pi / 2.0, pole_epsilon)
    csc_s4 = csc_guarded(s * math.pi / 4.0, pole_epsilon)
    pi_ln2 = math.pi / math.log(2.0)
    return (
        pi_ln2 * (-c.R * k_a * k_b**2 * csc_3s4)
        + pi_ln2 * (c.Q * k_b**2 * csc_s2)
        + c.P * k_a * csc_s4
    )


# ---------------------------------------------------------------------------
# discrepancy table: closed forms vs references as data


DISCREPANCY_GAMMAS: tuple[float, ...] = (0.25, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0, 20.0)
DISCREPANCY_SNRS: tuple[float, ...] = (10.0, 100.0, 1000.0)


@dataclass(frozen=True)
class DiscrepancyRow:
    gamma: float | None  # None for metrics that are not gamma-indexed
    regime: str
    metric: str
    paper_value: float | None
    reference_value: float | None
    abs_dev: float | None  # signed: closed form minus reference
    rel_dev: float | None  # signed, relative to |reference|


def _row(gamma, regime, metric, closed, reference) -> DiscrepancyRow:
    abs_dev = rel_dev = None
    if closed is not None and reference is not None:
        abs_dev = closed - reference
        rel_dev = abs_dev / abs(reference) if reference != 0.0 else None
    return DiscrepancyRow(gamma, regime, metric, closed, reference, abs_dev, rel_dev)


def _fd_derivative(f: Callable[[float], float], gamma: float) -> float:
    h = gamma * 1e-5
    return (f(gamma + h) - f(gamma - h)) / (2.0 * h)


def discrepancy_rows(
    regimes: dict[str, TurbulenceParams] | None = None,
    snr_values: Sequence[float] = DISCREPANCY_SNRS,
    gammas: Sequence[float] = DISCREPANCY_GAMMAS,
    spectral_efficiency: float = 1.0,
    include_capacity: bool = True,
) -> list[DiscrepancyRow]:
    """Evaluate closed forms against references over the standard grid.

    Per (regime, average SNR): the per-link CDF against its quadrature
    reference, the end-to-end CDF against the reference CDF and against
    the per-link-closed-form combination, the closed-form density
    against the finite difference of the closed-form CDF, and the
    closed-form capacity against the quadrature capacity. Failures
    (poles, overflow) yield rows with missing values, never exceptions.
    """
    regimes = REGIME_PRESETS if regimes is None else regimes
    rows: list[DiscrepancyRow] = []
    for name, params in regimes.items():
        for snr in snr_values:
            label = f"{name}/snr={snr:g}"
            scen = RelayScenario(params, params, AvgSnr(snr), AvgSnr(snr), spectral_efficiency)
            link_ref = LinkSnrCdf(params, snr)
            e2e_ref = E2eReferenceCdf(scen)
            for g in gammas:
                rows.append(
                    _row(g, label, "link_cdf", _guarded(gg_cdf_snr_closed_form, g, params, snr), link_ref(g))
                )
                closed = _guarded(e2e_cdf_closed_form, g, scen)
                rows.append(_row(g, label, "e2e_cdf", closed, e2e_ref(g)))
                f_link = _guarded(gg_cdf_snr_closed_form, g, params, snr)
                combo = None
                if f_link is not None:
                    combo = combine_link_cdfs(f_link, f_link, f_link)
                rows.append(_row(g, label, "e2e_cdf_combination", closed, combo))
                pdf = _guarded(e2e_pdf_closed_form, g, scen)
                fd = _guarded(_fd_derivative, lambda t: e2e_cdf_closed_form(t, scen), g)
                rows.append(_row(g, label, "e2e_pdf_fd", pdf, fd))
            if include_capacity:
                cap_closed = _guarded(ergodic_capacity_closed_form, scen)
                cap_quad = _guarded(ergodic_capacity_quadrature, scen)
                rows.append(_row(None, label, "capacity", cap_closed, cap_quad))
    return rows


def _guarded(fn: Callable, *args) -> float | None:
    try:
        value = fn(*args)
    except (SpecfunError, OverflowError, ZeroDivisionError):
        return None
    return value if math.isfinite(value) else None
