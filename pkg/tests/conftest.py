import numpy as np
import pytest
from hypothesis import settings

from fastlight.config import load_config
from fastlight.medium import LineComponent, MediumChannel

settings.register_profile("default", max_examples=50, deadline=None)
settings.load_profile("default")

TWO_PI_MHZ = 2 * np.pi * 1e6
L_CELL = 0.017


def gain_line(strength=175.0, hwhm_mhz=20.0, center_mhz=0.0):
    return LineComponent(center_mhz * TWO_PI_MHZ, hwhm_mhz * TWO_PI_MHZ, strength)


@pytest.fixture
def seed_line_channel():
    return MediumChannel(L_CELL, [gain_line()])


@pytest.fixture
def conjugate_pair_channel():
    return MediumChannel(
        L_CELL, [gain_line(175.0, 20.0, -8.0), gain_line(-95.0, 23.0, 26.64)]
    )


@pytest.fixture(scope="session")
def default_config():
    return load_config("default")
