import math

import pytest

from gravibar.constants import SOLAR_MASS
from gravibar.detector import DetectorSpec, MATERIALS
from gravibar.waveform import ChirpSource

OMEGA_100HZ = 2 * math.pi * 100.0


@pytest.fixture
def ns_merger_chirp() -> ChirpSource:
    """Neutron-star merger style chirp: M_c = 1.19 solar masses, amplitude
    2e-22 at resonance, starting at 30 Hz so the 100 Hz crossing sits at
    ~53 s on the signal clock."""
    return ChirpSource.from_solar_masses(
        1.19, h0=2e-22, nu0=2 * math.pi * 30.0
    )


@pytest.fixture
def beryllium_100hz() -> DetectorSpec:
    return DetectorSpec.from_frequency(
        MATERIALS["beryllium"], OMEGA_100HZ, radius=0.5
    )
