import numpy as np
import pytest

from ovlc.channel import REGIME_PRESETS, TurbulenceParams
from ovlc.specfun import QuadratureSpec

# (alpha, beta) regime presets exercised throughout the suite
REGIMES = {name: (p.alpha, p.beta) for name, p in REGIME_PRESETS.items()}

TIGHT_QUAD = QuadratureSpec(abs_tolerance=1e-12, rel_tolerance=1e-11, max_subdivisions=2000)


@pytest.fixture(scope="session")
def regimes() -> dict[str, TurbulenceParams]:
    return dict(REGIME_PRESETS)


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20240901)
