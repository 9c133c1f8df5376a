"""Sampling correctness, estimator calibration, reproducibility.

Statistical assertions run at 3 standard errors against quadrature
references, or at the 1% Kolmogorov-Smirnov level; seeds are fixed, so
the suite is deterministic.
"""

import math

import numpy as np
import pytest

from ovlc.analytic import (
    E2eReferenceCdf,
    ergodic_capacity_quadrature,
    outage_probability,
    scenario_from_preset,
)
from ovlc.channel import AvgSnr, TurbulenceParams, gg_pdf_h, gg_pdf_snr
from ovlc.montecarlo import (
    BLOCK_SIZE,
    EstimateWithError,
    SimConfig,
    estimate_capacity,
    estimate_outage,
    ks_critical_value,
    ks_distance,
    sample_gg_fading,
    simulate_destination_snr,
    substream,
    tabulate_cdf,
)
from ovlc.specfun import DomainError

from conftest import REGIMES

WEAK = TurbulenceParams(8.1, 4.0)
WEAK100 = scenario_from_preset("weak", 100.0, 1.0)


class TestFadingSampler:
    def test_unit_mean(self):
        h = sample_gg_fading(WEAK, substream(1, 0), 1_000_000)
        se = h.std(ddof=1) / math.sqrt(h.size)
        assert abs(h.mean() - 1.0) <= 3.0 * se

    def test_second_moment_identity(self):
        # E[h^2] = (1 + 1/alpha)(1 + 1/beta) for the product of
        # independent unit-mean gamma factors
        h = sample_gg_fading(WEAK, substream(2, 0), 1_000_000)
        h2 = h * h
        se = h2.std(ddof=1) / math.sqrt(h2.size)
        expected = (1.0 + 1.0 / 8.1) * (1.0 + 1.0 / 4.0)
        assert abs(h2.mean() - expected) <= 3.0 * se

    @pytest.mark.parametrize("name", list(REGIMES))
    def test_ks_against_quadrature_cdf(self, name, regimes):
        params = regimes[name]
        n = 100_000
        h = sample_gg_fading(params, substream(3, 0), n)
        grid = np.concatenate([[0.0], np.geomspace(1e-4, 80.0, 2500)])
        cdf = tabulate_cdf(lambda x: gg_pdf_h(x, params), grid)
        assert ks_distance(h, cdf) < ks_critical_value(n, 0.01)

    def test_snr_transformation_ks(self):
        # gamma = avg * h^2 must follow the transformed density
        gbar = 10.0
        n = 1_000_000
        h = sample_gg_fading(WEAK, substream(4, 0), n)
        snr = gbar * h * h
        grid = np.concatenate([[0.0], np.geomspace(1e-3, 5e4, 3000)])
        cdf = tabulate_cdf(lambda g: gg_pdf_snr(g, WEAK, gbar), grid)
        assert ks_distance(snr, cdf) < ks_critical_value(n, 0.01)

    @pytest.mark.parametrize("shape", [2.0, 3.0, 4.0, 8.1])
    def test_gamma_factor_moments(self, shape):
        # unit-mean gamma factor: mean 1, variance 1/shape
        rng = substream(5, 0)
        x = rng.gamma(shape, 1.0 / shape, 1_000_000)
        se_mean = x.std(ddof=1) / 1000.0
        assert abs(x.mean() - 1.0) <= 3.0 * se_mean
        centered_sq = (x - x.mean()) ** 2
        se_var = centered_sq.std(ddof=1) / 1000.0
        assert abs(x.var(ddof=1) - 1.0 / shape) <= 3.0 * se_var


class TestDestinationSnr:
    def test_draw_order_is_pinned(self):
        # the documented in-block order: h_sr factors, then each
        # destination branch; anyone reproducing the stream relies on it
        n = 10_000
        draws = simulate_destination_snr(WEAK100, substream(6, 0), "min", n)
        rng = substream(6, 0)
        h_sr = rng.gamma(8.1, 1 / 8.1, n) * rng.gamma(4.0, 1 / 4.0, n)
        h_r1 = rng.gamma(8.1, 1 / 8.1, n) * rng.gamma(4.0, 1 / 4.0, n)
        h_r2 = rng.gamma(8.1, 1 / 8.1, n) * rng.gamma(4.0, 1 / 4.0, n)
        g_sr = 100.0 * h_sr**2
        g_rd = np.maximum(100.0 * h_r1**2, 100.0 * h_r2**2)
        assert np.array_equal(draws, np.minimum(g_sr, g_rd))

    def test_min_mode_below_each_hop(self):
        n = 50_000
        draws = simulate_destination_snr(WEAK100, substream(6, 0), "min", n)
        rng = substream(6, 0)
        h_sr = rng.gamma(8.1, 1 / 8.1, n) * rng.gamma(4.0, 1 / 4.0, n)
        h_r1 = rng.gamma(8.1, 1 / 8.1, n) * rng.gamma(4.0, 1 / 4.0, n)
        h_r2 = rng.gamma(8.1, 1 / 8.1, n) * rng.gamma(4.0, 1 / 4.0, n)
        assert np.all(draws <= 100.0 * h_sr**2)
        assert np.all(draws <= np.maximum(100.0 * h_r1**2, 100.0 * h_r2**2))

    def test_dominance_chain_exhaustive(self):
        n = 100_000
        exact = simulate_destination_snr(WEAK100, substream(7, 0), "exact", n)
        harmonic = simulate_destination_snr(WEAK100, substream(7, 0), "harmonic", n)
        min_bound = simulate_destination_snr(WEAK100, substream(7, 0), "min", n)
        assert np.all(exact <= harmonic)
        assert np.all(harmonic <= min_bound)

    def test_min_mode_matches_reference_cdf(self):
        n = 100_000
        draws = simulate_destination_snr(WEAK100, substream(8, 0), "min", n)
        ref = E2eReferenceCdf(WEAK100)
        grid = np.concatenate([[0.0], np.geomspace(1e-2, 5e4, 900)])
        table = np.array([ref(g) for g in grid])
        assert ks_distance(draws, lambda x: np.interp(x, grid, table)) < ks_critical_value(n, 0.01)

    def test_mode_validation(self):
        with pytest.raises(DomainError):
            simulate_destination_snr(WEAK100, substream(0, 0), "median", 10)


class TestEstimators:
    def test_outage_vanishes_at_huge_snr(self):
        scen = WEAK100.with_avg_snr(AvgSnr(1e12))
        est = estimate_outage(SimConfig(scen, 100_000, 1, 1))
        assert est.estimate == 0.0

    def test_outage_saturates_at_huge_threshold(self):
        est = estimate_outage(SimConfig(WEAK100, 100_000, 1, 1), spectral_efficiency=20.0)
        assert est.estimate == 1.0

    def test_outage_against_quadrature(self):
        est = estimate_outage(SimConfig(WEAK100, 1_000_000, 20240901, 1), mode="min")
        assert est.within(outage_probability(WEAK100), 3.0)

    def test_outage_se_is_binomial(self):
        est = estimate_outage(SimConfig(WEAK100, 200_000, 12, 1))
        assert est.std_error == pytest.approx(
            math.sqrt(est.estimate * (1 - est.estimate) / est.n), rel=1e-12
        )

    def test_capacity_zero_snr(self):
        scen = scenario_from_preset("strong", 1e-12)
        est = estimate_capacity(SimConfig(scen, 100_000, 2, 1))
        assert est.estimate == pytest.approx(0.0, abs=1e-9)

    def test_capacity_against_quadrature(self):
        scen = scenario_from_preset("strong", 100.0)
        est = estimate_capacity(SimConfig(scen, 1_000_000, 77, 1), mode="min")
        assert est.within(ergodic_capacity_quadrature(scen), 3.0)

    def test_capacity_mode_ordering(self):
        cfg = SimConfig(WEAK100, 400_000, 31, 1)
        exact = estimate_capacity(cfg, mode="exact")
        min_bound = estimate_capacity(cfg, mode="min")
        joint_se = math.hypot(exact.std_error, min_bound.std_error)
        assert exact.estimate <= min_bound.estimate + 3.0 * joint_se

    def test_capacity_se_matches_sample_std(self):
        cfg = SimConfig(WEAK100, 3 * BLOCK_SIZE + 17, 5, 1)
        est = estimate_capacity(cfg, mode="min")
        draws = np.concatenate(
            [
                simulate_destination_snr(WEAK100, substream(5, i), "min", size)
                for i, size in enumerate([BLOCK_SIZE, BLOCK_SIZE, BLOCK_SIZE, 17])
            ]
        )
        rates = np.log2(1.0 + draws)
        assert est.estimate == pytest.approx(rates.mean(), rel=1e-12)
        assert est.std_error == pytest.approx(rates.std(ddof=1) / math.sqrt(rates.size), rel=1e-9)


class TestReproducibility:
    def test_bit_identical_across_runs(self):
        cfg = SimConfig(WEAK100, 300_000, 424242, 1)
        assert estimate_outage(cfg) == estimate_outage(cfg)
        assert estimate_capacity(cfg) == estimate_capacity(cfg)

    @pytest.mark.parametrize("workers", [2, 3])
    def test_bit_identical_across_worker_counts(self, workers):
        serial = SimConfig(WEAK100, 200_000, 7, 1)
        parallel = SimConfig(WEAK100, 200_000, 7, workers)
        assert estimate_outage(serial) == estimate_outage(parallel)
        assert estimate_capacity(serial) == estimate_capacity(parallel)

    def test_independent_of_block_layout_inputs_only(self):
        # different seeds or sample counts must change the outcome
        a = estimate_outage(SimConfig(WEAK100, 200_000, 7, 1))
        b = estimate_outage(SimConfig(WEAK100, 200_000, 8, 1))
        assert a != b

    def test_substream_cross_independence(self):
        n = 100_000
        x = substream(99, 0).standard_normal(n)
        y = substream(99, 1).standard_normal(n)
        r = float(np.corrcoef(x, y)[0, 1])
        assert abs(r) < 2.5758 / math.sqrt(n)  # 1% two-sided normal bound

    def test_substreams_differ(self):
        assert substream(99, 0).integers(0, 2**63) != substream(99, 1).integers(0, 2**63)


class TestConfigValidation:
    def test_sample_count(self):
        with pytest.raises(DomainError):
            SimConfig(WEAK100, 0, 1, 1)

    def test_worker_count(self):
        with pytest.raises(DomainError):
            SimConfig(WEAK100, 1, 1, 0)

    def test_seed_range(self):
        with pytest.raises(DomainError):
            SimConfig(WEAK100, 1, -1, 1)
        with pytest.raises(DomainError):
            SimConfig(WEAK100, 1, 2**64, 1)

    def test_estimate_within_helper(self):
        est = EstimateWithError(1.0, 0.1, 100)
        assert est.within(1.25, 3.0)
        assert not est.within(1.5, 3.0)
