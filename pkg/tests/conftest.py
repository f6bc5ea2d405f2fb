import numpy as np
import pytest

from wirenoise import db_to_alpha, drw_params


@pytest.fixture(scope="session")
def drw_5db():
    """Dual-rail wire parameters at 5 dB of squeezing."""
    return drw_params(db_to_alpha(5.0))


@pytest.fixture()
def rng():
    return np.random.default_rng(20240917)
