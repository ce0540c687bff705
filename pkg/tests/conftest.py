import math

import pytest

from pcqed import C_LIGHT, GenericProfileParams

# Reference generic scenario used throughout: optical transition at
# 2.4e15 rad/s, lattice period 1.6*pi*c/omega, half-path of ten periods,
# envelope decay of one period, peak Rabi frequency 11e9 rad/s.
OMEGA_GENERIC = 2.4e15
LATTICE_GENERIC = 1.6 * math.pi * C_LIGHT / OMEGA_GENERIC
OMEGA0_GENERIC = 11e9

# Millimeter-wave scenarios: resonance wavelength 5.9 mm.
OMEGA_MM = 2 * math.pi * C_LIGHT / 5.9e-3
LATTICE_2D = 2.202e-3
LATTICE_3D = 3.18e-3


def generic_family(velocity: float = 433.0, zeta: float = 0.0) -> GenericProfileParams:
    return GenericProfileParams(
        omega0=OMEGA0_GENERIC,
        path_half_length=10 * LATTICE_GENERIC,
        defect_radius=LATTICE_GENERIC,
        lattice_const=LATTICE_GENERIC,
        velocity=velocity,
        zeta=zeta,
    )


@pytest.fixture
def fig_family() -> GenericProfileParams:
    return generic_family()
