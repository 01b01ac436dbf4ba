from __future__ import annotations

import numpy as np
import pytest

from btgp.inference import AssetHistory
from btgp.models import ModelSpec, Orientation, simulate_paths

# Baseline bridge fits used throughout (BCI scale, x_lim = 100).
BTGP_BASE = (1.66, 0.84, 136.12)
BNGP_BASE = (0.82, 0.83, 76.51)
XI_BCI = 40.0
XI_DEG = 60.0


@pytest.fixture(scope="session")
def btgp_base():
    return ModelSpec("BTGP", BTGP_BASE, 100.0)


@pytest.fixture(scope="session")
def bngp_base():
    return ModelSpec("BNGP", BNGP_BASE, 100.0)


def simulate_histories(m: ModelSpec, n_assets: int, n_records: int, seed: int,
                       gap=(2.0, 8.0), prefix="a") -> list[AssetHistory]:
    """Inspection histories with uniform random gaps, recorded in ``m``'s orientation."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_assets):
        ages = np.round(np.cumsum(rng.uniform(*gap, n_records)), 3)
        path = simulate_paths(m, np.r_[0.0, ages], 1, rng)[0, 1:]
        out.append(AssetHistory(f"{prefix}{i:04d}", list(zip(ages, path)), m.x_lim))
    return out


def decreasing(m: ModelSpec) -> ModelSpec:
    return ModelSpec(m.variant, m.theta, m.x_lim, Orientation.DECREASING)
