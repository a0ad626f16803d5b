import math

import numpy as np
import pytest

from qstsim.model import reference_params, resonant_params
from qstsim.scenario import ScenarioConfig, calibrate_dephasing

REFERENCE_THETAS = (math.pi / 6, math.pi / 4, math.pi / 3, 75 * math.pi / 180)


@pytest.fixture
def paper():
    return reference_params()


@pytest.fixture
def resonant():
    return resonant_params()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)


@pytest.fixture(scope="session")
def calibration():
    """Shared dephasing calibration against the reference configuration."""
    config = ScenarioConfig(
        params=reference_params(),
        backend="nonhermitian",
        rel_tol=1e-11,
        abs_tol=1e-13,
    )
    return calibrate_dephasing(config, target_fidelity=0.990, target_theta=math.pi / 4)
