"""Physical constants and the built-in material table.

All quantities are SI. The constants are the single source of truth for
every module in the package; CODATA 2018 values are used throughout.
"""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class PhysicalConstants:
    """Fundamental constants used by the rate and dynamics formulas.

    Attributes
    ----------
    G : float
        Newtonian gravitational constant [m^3 kg^-1 s^-2].
    c : float
        Speed of light in vacuum [m/s].
    hbar : float
        Reduced Planck constant [J s].
    k_B : float
        Boltzmann constant [J/K].
    """

    G: float = 6.67430e-11
    c: float = 2.99792458e8
    hbar: float = 1.054571817e-34
    k_B: float = 1.380649e-23


CONSTANTS = PhysicalConstants()

G = CONSTANTS.G
C_LIGHT = CONSTANTS.c
HBAR = CONSTANTS.hbar
K_B = CONSTANTS.k_B

# Solar mass [kg], used to express binary chirp masses.
SOLAR_MASS = 1.989e30
