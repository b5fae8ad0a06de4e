import math

import pytest

import modedec as m

KHZ = 2e3 * math.pi  # kHz -> rad/s


@pytest.fixture(scope="session")
def reference_design():
    """N=6 reference design: w_k = 4.8 kHz, shift range +-22.5 kHz."""
    return m.ModeDesign.equal_levels(6, 4.8 * KHZ, 22.5 * KHZ)


@pytest.fixture(scope="session")
def reference_cascade(reference_design):
    return m.build_cascade(reference_design)
