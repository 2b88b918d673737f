"""Sensitivity bookkeeping: graviton counts, golden-rule rates, strain floors.

Links the semiclassical rates to the quantum picture (stimulated absorption
of single gravitons from a coherent wave) and converts detector parameters
into characteristic strain sensitivities comparable across bar designs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .constants import G, C_LIGHT, HBAR, K_B
from .detector import DetectorSpec, gamma_spontaneous, mode_frequency


@dataclass(frozen=True)
class SensitivityPoint:
    """One point of a characteristic-strain sensitivity curve."""

    frequency: float  # Hz
    h_c: float
    label: str = ""

    def __post_init__(self) -> None:
        if self.h_c <= 0.0:
            raise ValueError(f"h_c must be > 0, got {self.h_c}")


def graviton_number(h0: float, nu: float) -> float:
    """Number of gravitons in a wave of strain h0 at angular frequency nu.

    N = h0^2 c^5 / (32 pi G hbar nu^2): the wave's energy density divided by
    that of one quantum of energy hbar*nu in a box of size c/nu.
    """
    if h0 <= 0.0 or nu <= 0.0:
        raise ValueError("h0 and nu must be > 0")
    return h0**2 * C_LIGHT**5 / (32.0 * math.pi * G * HBAR * nu**2)


def golden_rule_stimulated(spec: DetectorSpec, n_gravitons: float) -> float:
    """Stimulated absorption rate for a coherent wave of n_gravitons quanta.

    Gamma = (n/l^4) * 8 G M L^2 omega_l^4 / (pi^4 c^5); with n = 1 this is
    the spontaneous coefficient, and with n = graviton_number(h0, omega_l)
    it reproduces the classical-field stimulated rate.
    """
    if n_gravitons < 0.0:
        raise ValueError(f"n_gravitons must be >= 0, got {n_gravitons}")
    return n_gravitons * gamma_spontaneous(spec)


def stimulated_rate_wavepacket(spec: DetectorSpec, h0: float) -> float:
    """Golden-rule stimulated rate for a narrow wavepacket around resonance.

    Gamma = h0^2 M v_s^2 / (4 hbar pi^3), using the reduced single-graviton
    volume (c/omega)^3 for the density of states.
    """
    v_s = spec.material.sound_speed
    return h0**2 * spec.mass * v_s**2 / (4.0 * HBAR * math.pi**3)


def monochromatic_rate(spec: DetectorSpec, h0: float, n_cycles: float) -> float:
    """Excitation rate of a strictly monochromatic resonant wave after
    n_cycles cycles: Gamma = h0^2 N_c M v_s^2 / (pi hbar)."""
    v_s = spec.material.sound_speed
    return h0**2 * n_cycles * spec.mass * v_s**2 / (math.pi * HBAR)


def characteristic_strain(spec: DetectorSpec) -> float:
    """Minimum detectable wavepacket strain h_c = 2 pi sqrt(pi k_B T/(M v_s^2 Q)).

    Defined by balancing the wavepacket stimulated rate against the thermal
    excitation rate (with classical occupation).
    """
    v_s = spec.material.sound_speed
    return 2.0 * math.pi * math.sqrt(
        math.pi * K_B * spec.temperature / (spec.mass * v_s**2 * spec.quality)
    )


def min_strain_monochromatic(spec: DetectorSpec, n_cycles: float) -> float:
    """Minimum detectable strain of a strictly monochromatic wave.

    h0 = sqrt(pi k_B T / (M v_s^2 Q N_c)); relates to the characteristic
    strain via h_c = 2 pi h0 sqrt(N_c).
    """
    if n_cycles < 1.0:
        raise ValueError(f"n_cycles must be >= 1, got {n_cycles}")
    v_s = spec.material.sound_speed
    return math.sqrt(
        math.pi * K_B * spec.temperature
        / (spec.mass * v_s**2 * spec.quality * n_cycles)
    )


def classical_timedelay(spec: DetectorSpec, h0: float, omega: float) -> float:
    """Time for a classical wave to deposit one quantum through the bar's
    cross-section.

    The wave's energy density is E = (c^2/(32 pi G)) omega^2 h0^2, its flux
    j = c E / 4; the timescale is hbar*omega / (j * pi R^2). Resolving a
    quantum jump faster than this would rule out continuous classical
    energy transfer.
    """
    energy_density = C_LIGHT**2 / (32.0 * math.pi * G) * omega**2 * h0**2
    flux = C_LIGHT / 4.0 * energy_density
    area = math.pi * spec.radius**2
    return HBAR * omega / (flux * area)


def sensitivity_curve(
    template: DetectorSpec, frequencies_hz, *, label: str | None = None
) -> list[SensitivityPoint]:
    """Characteristic strain across a frequency grid at fixed material, R, Q, T.

    At each frequency the bar length follows from L = l pi v_s / omega and
    the mass from the geometry, so the curve reflects a family of detectors
    of the template's material and radius tuned across the band.
    """
    frequencies_hz = np.asarray(frequencies_hz, dtype=float)
    if frequencies_hz.ndim != 1 or frequencies_hz.size < 1:
        raise ValueError("frequency grid must be a non-empty 1-D array")
    if np.any(np.diff(frequencies_hz) <= 0.0) and frequencies_hz.size > 1:
        raise ValueError("frequency grid must be ascending")
    if label is None:
        label = template.material.name
    points = []
    for f in frequencies_hz:
        spec = DetectorSpec.from_frequency(
            template.material,
            2.0 * math.pi * f,
            radius=template.radius,
            mode_index=template.mode_index,
            quality=template.quality,
            temperature=template.temperature,
        )
        points.append(SensitivityPoint(float(f), characteristic_strain(spec), label))
    return points


def thermal_rate_classical(spec: DetectorSpec, *, omega: float | None = None) -> float:
    """Thermal excitation rate with the classical occupation k_B T/(hbar omega).

    gamma_th = omega * nbar / Q -> k_B T / (hbar Q); this is the limit in
    which the strain-floor balance identities are exact.
    """
    return K_B * spec.temperature / (HBAR * spec.quality)


__all__ = [
    "SensitivityPoint",
    "characteristic_strain",
    "classical_timedelay",
    "golden_rule_stimulated",
    "graviton_number",
    "min_strain_monochromatic",
    "monochromatic_rate",
    "sensitivity_curve",
    "stimulated_rate_wavepacket",
    "thermal_rate_classical",
]
