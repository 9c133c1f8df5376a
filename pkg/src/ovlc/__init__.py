"""Dual-hop amplify-and-forward outdoor visible-light link model.

Channel and noise physics, closed-form outage/capacity evaluators, and
the quadrature plus Monte Carlo oracles that check them.
"""

from .analytic import (
    CapacityConstants,
    DiscrepancyRow,
    E2eReferenceCdf,
    RelayScenario,
    capacity_constants,
    combine_link_cdfs,
    discrepancy_rows,
    e2e_cdf_closed_form,
    e2e_cdf_reference,
    e2e_pdf_closed_form,
    e2e_snr_bound,
    e2e_snr_exact,
    ergodic_capacity_closed_form,
    ergodic_capacity_quadrature,
    outage_probability,
    sc_combine_cdf,
    scenario_from_preset,
)
from .channel import (
    REGIME_PRESETS,
    AlphaBetaResult,
    AvgSnr,
    LinkGeometry,
    LinkSnrCdf,
    PhysicalOrigin,
    TurbulenceParams,
    WeakTurbulenceWarning,
    alpha_beta_from_physics,
    gg_cdf_snr_closed_form,
    gg_cdf_snr_reference,
    gg_pdf_h,
    gg_pdf_snr,
    lambertian_gain,
)
from .montecarlo import (
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
from .noise import (
    LinkBudget,
    NoiseEnvironment,
    average_snr,
    blackbody_irradiance,
    link_budget,
    shot_variance,
    spectral_fraction,
    thermal_variance,
    total_noise_variance,
)
from .scenario import Scenario, ScenarioError, load_scenario, parse_scenario
from .specfun import (
    DEFAULT_QUADRATURE,
    DomainError,
    IntegralEstimate,
    KEval,
    PoleProximityError,
    QuadratureError,
    QuadratureSpec,
    RangeOverflowError,
    SpecfunError,
    bessel_k,
    bessel_k_checked,
    csc_guarded,
    gamma_fn,
    integrate,
    integrate_adaptive_simpson,
)
from .sweep import SweepResult, SweepRow, emit_report, run_sweep

__version__ = "0.1.0"
