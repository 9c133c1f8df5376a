"""Stochastic oracle: exact sampling of the fading chain.

Sampling is organized in fixed-size blocks. Block ``i`` of a run draws
from ``PCG64(SeedSequence(entropy=master_seed, spawn_key=(i,)))`` and
reductions run in block order, so estimates are a pure function of
(scenario, sample_count, master_seed): bit-identical across runs,
worker counts and scheduling. Within a block the draw order is fixed:
the two gamma factors of h_sr, then of h_rd1, then of h_rd2, each as
one batch.

The Gamma-Gamma coefficient is sampled exactly as the product of two
independent unit-mean gamma variates (shapes alpha and beta), which is
the distribution the channel layer's density describes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .analytic import RelayScenario
from .channel import TurbulenceParams
from .specfun import DomainError, QuadratureSpec, integrate

__all__ = [
    "BLOCK_SIZE",
    "SimConfig",
    "EstimateWithError",
    "substream",
    "sample_gg_fading",
    "simulate_destination_snr",
    "estimate_outage",
    "estimate_capacity",
    "ks_distance",
    "ks_critical_value",
    "tabulate_cdf",
]

BLOCK_SIZE = 1 << 16

_MODES = ("exact", "harmonic", "min")


@dataclass(frozen=True)
class SimConfig:
    """Inputs that fully determine a Monte Carlo estimate."""

    scenario: RelayScenario
    sample_count: int = 1_000_000
    master_seed: int = 20240901
    worker_count: int = 1

    def __post_init__(self):
        if self.sample_count < 1:
            raise DomainError("sample_count must be >= 1")
        if self.worker_count < 1:
            raise DomainError("worker_count must be >= 1")
        if not 0 <= self.master_seed < 2**64:
            raise DomainError("master_seed must fit in 64 unsigned bits")


@dataclass(frozen=True)
class EstimateWithError:
    """A point estimate with its standard error and sample count."""

    estimate: float
    std_error: float
    n: int

    def within(self, value: float, n_se: float = 3.0) -> bool:
        """True when ``value`` lies inside n_se standard errors."""
        return abs(self.estimate - value) <= n_se * self.std_error


def substream(master_seed: int, block_index: int) -> np.random.Generator:
    """The documented per-block stream derivation."""
    seq = np.random.SeedSequence(entropy=master_seed, spawn_key=(block_index,))
    return np.random.Generator(np.random.PCG64(seq))


def sample_gg_fading(
    params: TurbulenceParams,
    rng: np.random.Generator,
    size: int | None = None,
) -> "float | np.ndarray":
    """Draws of the unit-mean Gamma-Gamma fading coefficient."""
    small = rng.gamma(params.alpha, 1.0 / params.alpha, size)
    large = rng.gamma(params.beta, 1.0 / params.beta, size)
    return small * large


def simulate_destination_snr(
    scen: RelayScenario,
    rng: np.random.Generator,
    mode: str = "exact",
    size: int | None = None,
) -> "float | np.ndarray":
    """End-to-end SNR draws: independent hops, selection combining, then ``mode``."""
    if mode not in _MODES:
        raise DomainError(f"mode must be one of {_MODES}, got {mode!r}")
    h_sr = sample_gg_fading(scen.sr_turbulence, rng, size)
    h_rd1 = sample_gg_fading(scen.rd_turbulence, rng, size)
    p2, s2 = scen.branch2()
    h_rd2 = sample_gg_fading(p2, rng, size)
    g_sr = scen.avg_snr_sr.value * np.square(h_sr)
    g_rd = np.maximum(scen.avg_snr_rd.value * np.square(h_rd1), s2.value * np.square(h_rd2))
    if mode == "min":
        return np.minimum(g_sr, g_rd)
    if mode == "harmonic":
        return g_sr * g_rd / (g_sr + g_rd)
    return g_sr * g_rd / (g_sr + g_rd + 1.0)


def _block_sizes(sample_count: int) -> list[int]:
    full, rest = divmod(sample_count, BLOCK_SIZE)
    return [BLOCK_SIZE] * full + ([rest] if rest else [])


def _outage_block(args) -> int:
    scen, master_seed, index, size, mode, threshold = args
    draws = simulate_destination_snr(scen, substream(master_seed, index), mode, size)
    return int(np.count_nonzero(draws <= threshold))


def _capacity_block(args) -> tuple[float, float]:
    scen, master_seed, index, size, mode = args
    draws = simulate_destination_snr(scen, substream(master_seed, index), mode, size)
    rates = np.log2(1.0 + draws)
    return float(np.sum(rates)), float(np.dot(rates, rates))


def _run_blocks(worker: Callable, tasks: list, worker_count: int) -> list:
    if worker_count <= 1 or len(tasks) <= 1:
        return [worker(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=worker_count) as pool:
        return list(pool.map(worker, tasks))  # order preserved: reduction stays block-ordered


def estimate_outage(
    config: SimConfig,
    spectral_efficiency: float | None = None,
    mode: str = "min",
) -> EstimateWithError:
    """Empirical outage probability with binomial standard error."""
    r_se = config.scenario.spectral_efficiency if spectral_efficiency is None else spectral_efficiency
    if not r_se > 0.0:
        raise DomainError("spectral_efficiency must be strictly positive")
    threshold = 2.0 ** (2.0 * r_se) - 1.0
    tasks = [
        (config.scenario, config.master_seed, i, size, mode, threshold)
        for i, size in enumerate(_block_sizes(config.sample_count))
    ]
    hits = sum(_run_blocks(_outage_block, tasks, config.worker_count))
    n = config.sample_count
    p = hits / n
    return EstimateWithError(p, math.sqrt(p * (1.0 - p) / n), n)


def estimate_capacity(config: SimConfig, mode: str = "min") -> EstimateWithError:
    """Empirical ergodic capacity (mean of log2(1 + SNR)) with CLT standard error."""
    tasks = [
        (config.scenario, config.master_seed, i, size, mode)
        for i, size in enumerate(_block_sizes(config.sample_count))
    ]
    partials = _run_blocks(_capacity_block, tasks, config.worker_count)
    total = 0.0
    total_sq = 0.0
    for s, sq in partials:
        total += s
        total_sq += sq
    n = config.sample_count
    mean = total / n
    if n > 1:
        variance = max(0.0, (total_sq - n * mean * mean) / (n - 1))
        se = math.sqrt(variance / n)
    else:
        se = 0.0
    return EstimateWithError(mean, se, n)


# ---------------------------------------------------------------------------
# distribution-comparison utilities (used by the oracle tests)


def ks_distance(samples: Sequence[float], cdf: Callable[[np.ndarray], np.ndarray]) -> float:
    """One-sample Kolmogorov-Smirnov distance against a model CDF."""
    x = np.sort(np.asarray(samples, dtype=float))
    n = x.size
    if n == 0:
        raise DomainError("ks_distance needs at least one sample")
    f = np.asarray(cdf(x), dtype=float)
    steps = np.arange(1, n + 1, dtype=float)
    return float(np.max(np.maximum(f - (steps - 1.0) / n, steps / n - f)))


def ks_critical_value(n: int, significance: float = 0.01) -> float:
    """Asymptotic one-sample KS critical value at the given significance."""
    if n < 1 or not 0.0 < significance < 1.0:
        raise DomainError("need n >= 1 and significance in (0, 1)")
    return math.sqrt(-0.5 * math.log(significance / 2.0)) / math.sqrt(n)


def tabulate_cdf(
    pdf: Callable[[float], float],
    grid: Sequence[float],
    quadrature: QuadratureSpec | None = None,
) -> Callable[[np.ndarray], np.ndarray]:
    """Cumulative table of a density over an increasing grid, as an interpolant.

    Panel integrals accumulate left to right; queries interpolate
    linearly and clamp to the table edges. Dense grids (a few thousand
    points around the bulk of the mass) keep the interpolation error
    orders of magnitude below any KS critical value in use here.
    """
    pts = np.asarray(grid, dtype=float)
    if pts.ndim != 1 or pts.size < 2 or np.any(np.diff(pts) <= 0):
        raise DomainError("grid must be strictly increasing with at least two points")
    spec = quadrature or QuadratureSpec(abs_tolerance=1e-11, rel_tolerance=1e-8, max_subdivisions=64)
    cum = np.empty_like(pts)
    cum[0] = 0.0
    for i in range(1, pts.size):
        value, _ = integrate(pdf, pts[i - 1], pts[i], spec)
        cum[i] = cum[i - 1] + value

    def cdf(x: np.ndarray) -> np.ndarray:
        return np.interp(np.asarray(x, dtype=float), pts, cum)

    return cdf
