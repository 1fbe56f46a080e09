# tests/conftest.py
from __future__ import annotations

import numpy as np
import pytest

from packages.bweibull.dist import BWeibull, ParamVector

# alpha x beta x delta grid used by the property suites
ALPHAS = (0.5, 1.0, 2.0, 3.7)
BETAS = (0.5, 2.0)
DELTAS = (-2.0, 0.0, 0.2, 2.3)
THETA_GRID = [(a, b, d) for a in ALPHAS for b in BETAS for d in DELTAS]


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture(params=THETA_GRID, ids=lambda t: "a{}-b{}-d{}".format(*t))
def grid_dist(request) -> BWeibull:
    return BWeibull(ParamVector(alpha=request.param[0], beta=request.param[1], delta=request.param[2]))


@pytest.fixture
def carbon_values() -> np.ndarray:
    from packages.bweibull.datasets import load_bundled

    return np.asarray(load_bundled("carbon_fibers").values)
