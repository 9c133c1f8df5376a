"""Kernel checks: gamma, K_nu, guarded cosecant, adaptive quadrature.

Expected values marked as frozen were computed beforehand with mpmath
at 40 digits; oracle comparisons recompute their reference live from
integral representations using the package's own quadrature.
"""

import math

import numpy as np
import pytest

from ovlc.specfun import (
    DomainError,
    PoleProximityError,
    QuadratureError,
    QuadratureSpec,
    RangeOverflowError,
    bessel_k,
    bessel_k_checked,
    csc_guarded,
    gamma_fn,
    integrate,
    integrate_adaptive_simpson,
)

from conftest import TIGHT_QUAD


class TestGamma:
    def test_integer_factorial(self):
        assert gamma_fn(5.0) == pytest.approx(24.0, rel=1e-14)

    def test_half(self):
        assert gamma_fn(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)

    def test_against_integral_definition(self):
        # oracle: Gamma(a) = int_0^inf t^(a-1) e^-t dt by adaptive quadrature
        value, _ = integrate(lambda t: t**3.2 * math.exp(-t), 0.0, math.inf, TIGHT_QUAD)
        assert gamma_fn(4.2) == pytest.approx(value, rel=1e-11)
        assert gamma_fn(4.2) == pytest.approx(7.756689535793178, rel=1e-12)  # frozen

    def test_recurrence_property(self):
        rng = np.random.default_rng(1)
        for x in rng.uniform(0.5, 20.0, 100):
            assert gamma_fn(x + 1.0) == pytest.approx(x * gamma_fn(x), rel=1e-11)

    @pytest.mark.parametrize("bad", [0.0, -1.0, -0.5, math.nan])
    def test_domain(self, bad):
        with pytest.raises(DomainError):
            gamma_fn(bad)

    def test_overflow_reported(self):
        with pytest.raises(RangeOverflowError):
            gamma_fn(200.0)


class TestBesselK:
    def test_half_order_closed_form(self):
        # K_{1/2}(x) = sqrt(pi/(2x)) e^-x
        for x in np.geomspace(1e-6, 50.0, 40):
            expected = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x)
            assert bessel_k(0.5, x) == pytest.approx(expected, rel=1e-10)
        assert bessel_k(0.5, 1.0) == pytest.approx(0.46106850444789456, rel=1e-12)  # frozen

    def test_three_halves_closed_form(self):
        # K_{3/2}(x) = sqrt(pi/(2x)) e^-x (1 + 1/x)
        for x in np.geomspace(1e-4, 50.0, 30):
            expected = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) * (1.0 + 1.0 / x)
            assert bessel_k(1.5, x) == pytest.approx(expected, rel=1e-10)

    def test_symmetry_in_order(self):
        rng = np.random.default_rng(2)
        for nu, x in zip(rng.uniform(0, 40, 50), rng.uniform(1e-3, 50, 50)):
            assert bessel_k(-nu, x) == bessel_k(nu, x)

    def test_against_integral_representation(self):
        # oracle: K_nu(x) = int_0^inf exp(-x cosh t) cosh(nu t) dt; the
        # integrand underflows to 0 past t ~ 7 for x = 2, so a finite
        # window of [0, 40] loses nothing
        value, _ = integrate(
            lambda t: math.exp(-2.0 * math.cosh(t)) * math.cosh(4.1 * t), 0.0, 40.0, TIGHT_QUAD
        )
        assert bessel_k(4.1, 2.0) == pytest.approx(value, rel=1e-11)
        assert bessel_k(4.1, 2.0) == pytest.approx(2.5154089534644125, rel=1e-12)  # frozen

    @pytest.mark.parametrize(
        "nu,x,expected",
        [
            # frozen from mpmath besselk at 30 digits: integer and
            # near-integer orders exercising the uniform series branch
            (1.0, 0.5, 1.6564411200033009),
            (1.0 - 1e-9, 0.5, 1.6564411181544628),
            (1.0 + 1e-9, 0.5, 1.6564411218521392),
            (4.0, 2.0, 2.1959159274119583),
            (3.9999999, 2.0, 2.1959156316924622),
            (2.0 + 1e-12, 5.0, 0.0053089437122253733),
            (0.2, 1.2, 0.32256203435192623),
        ],
    )
    def test_near_integer_orders(self, nu, x, expected):
        assert bessel_k(nu, x) == pytest.approx(expected, rel=1e-10)

    def test_monotone_decreasing_in_argument(self):
        for nu in (0.0, 0.2, 1.2, 4.1, 17.3, 40.0):
            values = [bessel_k(nu, x) for x in np.geomspace(1e-3, 60.0, 80)]
            assert all(b < a for a, b in zip(values, values[1:]))

    def test_underflow_flagged(self):
        result = bessel_k_checked(0.5, 800.0)
        assert result.underflow
        assert result.value == 0.0
        assert not bessel_k_checked(0.5, 1.0).underflow

    def test_overflow_reported(self):
        # K_40 near the bottom of the argument range sits at ~1e298;
        # slightly below 1e-6 it leaves the double range
        with pytest.raises(RangeOverflowError):
            bessel_k(40.0, 1e-8)

    @pytest.mark.parametrize("bad", [0.0, -1.0, math.nan])
    def test_domain_argument(self, bad):
        with pytest.raises(DomainError):
            bessel_k(1.0, bad)

    def test_domain_order(self):
        with pytest.raises(DomainError):
            bessel_k(40.5, 1.0)


class TestCscGuarded:
    def test_known_values(self):
        assert csc_guarded(math.pi / 2) == pytest.approx(1.0, rel=1e-14)
        assert csc_guarded(math.pi / 6) == pytest.approx(2.0, rel=1e-13)

    def test_pole_guard(self):
        with pytest.raises(PoleProximityError):
            csc_guarded(math.pi - 1e-15, 1e-9)
        with pytest.raises(PoleProximityError):
            csc_guarded(3.0 * math.pi, 1e-9)
        with pytest.raises(PoleProximityError):
            csc_guarded(0.0)

    def test_just_outside_guard(self):
        assert csc_guarded(math.pi - 1e-6, 1e-9) == pytest.approx(1e6, rel=1e-3)

    def test_epsilon_validation(self):
        with pytest.raises(DomainError):
            csc_guarded(1.0, 0.0)


class TestIntegrate:
    def test_polynomial(self):
        value, err = integrate(lambda x: 3.0 * x * x, 0.0, 1.0)
        assert value == pytest.approx(1.0, abs=1e-12)
        assert err < 1e-10

    def test_exponential_tail(self):
        value, _ = integrate(lambda x: math.exp(-x), 0.0, math.inf)
        assert value == pytest.approx(1.0, abs=1e-9)

    @pytest.mark.parametrize("a", [0.7, 2.5, 4.2])
    def test_gamma_integrals(self, a):
        value, _ = integrate(lambda t, a=a: t ** (a - 1.0) * math.exp(-t), 0.0, math.inf, TIGHT_QUAD)
        assert value == pytest.approx(gamma_fn(a), rel=1e-10)

    def test_agrees_with_second_rule(self):
        # the adaptive Simpson rule is an independent implementation
        f = lambda x: math.exp(-x) * math.cos(3.0 * x)
        gk, _ = integrate(f, 0.0, math.inf, TIGHT_QUAD)
        simpson = integrate_adaptive_simpson(f, 0.0, math.inf, tol=1e-12)
        assert gk == pytest.approx(simpson, rel=1e-9)

    def test_nonconvergence_carries_best_estimate(self):
        spec = QuadratureSpec(abs_tolerance=1e-15, rel_tolerance=1e-15, max_subdivisions=3)
        with pytest.raises(QuadratureError) as excinfo:
            integrate(lambda x: math.sin(40.0 * x) ** 2 / (1e-3 + x), 0.0, 1.0, spec)
        assert math.isfinite(excinfo.value.estimate)
        assert excinfo.value.error_estimate > 0.0

    def test_endpoint_singularity_integrable(self):
        # x^(p-1) with p = 1/2; raw bisection resolves it to ~1e-7
        spec = QuadratureSpec(abs_tolerance=1e-7, rel_tolerance=1e-7, max_subdivisions=4000)
        value, _ = integrate(lambda x: x**-0.5, 0.0, 1.0, spec)
        assert value == pytest.approx(2.0, abs=1e-6)

    def test_limit_validation(self):
        with pytest.raises(DomainError):
            integrate(lambda x: x, 1.0, 0.0)
        with pytest.raises(DomainError):
            integrate(lambda x: x, math.nan, 1.0)
        with pytest.raises(DomainError):
            integrate(lambda x: x, -math.inf, 0.0)
        assert integrate(lambda x: x, 2.0, 2.0) == (0.0, 0.0)

    def test_infinite_limit_needs_transform(self):
        spec = QuadratureSpec(infinite_tail_transform=False)
        with pytest.raises(DomainError):
            integrate(lambda x: math.exp(-x), 0.0, math.inf, spec)

    def test_nonfinite_integrand_rejected(self):
        with pytest.raises(QuadratureError):
            integrate(lambda x: math.nan, 0.0, 1.0)


class TestQuadratureSpec:
    @pytest.mark.parametrize(
        "kwargs",
        [
            {"abs_tolerance": 0.0},
            {"rel_tolerance": -1.0},
            {"max_subdivisions": 0},
        ],
    )
    def test_invariants(self, kwargs):
        with pytest.raises(DomainError):
            QuadratureSpec(**kwargs)
