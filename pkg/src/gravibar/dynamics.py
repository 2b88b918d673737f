"""Semiclassical excitation dynamics of a driven resonator mode.

The central object is the resonant drive content

    chi(h, omega, t) = | integral of hddot(s) * exp(i*omega*s) ds |

evaluated by adaptive oscillatory quadrature or by closed forms
(monochromatic sinc, slow-chirp estimate, stationary phase). The coherent
displacement imparted to the mode is |beta| = (L/pi^2) sqrt(M/(omega*hbar))
* chi, and mode populations follow a Poisson distribution in |beta|^2.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .constants import HBAR
from .detector import DetectorSpec, Material, mode_frequency
from .waveform import (
    ChirpDomainError,
    ChirpSource,
    MonochromaticWave,
    SampledStrain,
    StrainSignal,
    chirp_frequency,
    chirp_window,
    resonance_crossing_time,
    resonance_time,
    strain_samples,
)


class QuadratureConvergenceError(RuntimeError):
    """Oscillatory quadrature failed to converge; carries the last estimate."""

    def __init__(self, message: str, last_estimate: complex):
        super().__init__(message)
        self.last_estimate = last_estimate


@dataclass(frozen=True)
class ChiResult:
    """Resonant drive content chi with provenance.

    Attributes
    ----------
    value : float
        chi >= 0, in strain * (rad/s)^2.
    method : str
        One of "quadrature", "monochromatic_closed_form", "chirp_analytic",
        "stationary_phase".
    window : tuple or None
        Integration window (t_start, t_end) [s]; None for closed forms
        without an explicit window.
    """

    value: float
    method: str
    window: tuple[float, float] | None = None

    def __post_init__(self) -> None:
        if self.value < 0.0:
            raise ValueError(f"chi must be >= 0, got {self.value}")


def _sinc(x):
    """Unnormalized sinc(x) = sin(x)/x with sinc(0) = 1."""
    return np.sinc(np.asarray(x) / np.pi)


def _max_signal_frequency(signal: StrainSignal, window: tuple[float, float]) -> float:
    if isinstance(signal, MonochromaticWave):
        return signal.nu
    if isinstance(signal, ChirpSource):
        t1 = min(window[1], signal.coalescence * (1.0 - 1e-12))
        return float(chirp_frequency(signal.nu0, signal.k, max(t1, 0.0)))
    if isinstance(signal, SampledStrain):
        return math.pi / signal.dt
    raise TypeError(f"not a strain signal: {signal!r}")


def oscillatory_integral(
    signal: StrainSignal,
    omega: float,
    window: tuple[float, float],
    *,
    tol: float = 1e-6,
    max_nodes: int = 2**23,
) -> complex:
    """Complex integral of hddot(s)*exp(i*omega*s) over the window.

    Analytic signals use composite Simpson with at least 20 samples per
    cycle of the fastest frequency present, doubled until the modulus
    changes by less than `tol` relative. Sampled strain is integrated on
    its own grid (trapezoid over the stored second differences), where no
    refinement is possible.

    Raises QuadratureConvergenceError (carrying the last estimate) if the
    refinement limit is reached without convergence.
    """
    t0, t1 = window
    if t1 <= t0:
        return 0.0 + 0.0j

    if isinstance(signal, SampledStrain):
        ts = signal.times
        keep = (ts >= t0) & (ts <= t1)
        ts = ts[keep]
        if ts.size < 2:
            return 0.0 + 0.0j
        integrand = signal.hddot_samples[keep] * np.exp(1j * omega * ts)
        return complex(np.trapezoid(integrand, ts))

    f_max = max(abs(omega), _max_signal_frequency(signal, window))
    n = int(np.ceil((t1 - t0) * f_max / (2.0 * math.pi) * 20.0))
    n = max(n + (n % 2), 8)

    def simpson(num: int) -> complex:
        s = np.linspace(t0, t1, num + 1)
        _, hddot, _ = strain_samples(signal, s)
        integrand = hddot * np.exp(1j * omega * s)
        w = np.ones(num + 1)
        w[1:-1:2] = 4.0
        w[2:-1:2] = 2.0
        return complex((t1 - t0) / num / 3.0 * np.dot(w, integrand))

    estimate = simpson(n)
    while True:
        n *= 2
        if n > max_nodes:
            raise QuadratureConvergenceError(
                f"oscillatory quadrature did not reach {tol:.1e} relative "
                f"within {max_nodes} nodes",
                estimate,
            )
        refined = simpson(n)
        scale = max(abs(refined), abs(estimate))
        if abs(refined - estimate) <= tol * scale:
            return refined
        estimate = refined


def chi_quadrature(
    signal: StrainSignal,
    omega: float,
    window: tuple[float, float],
    *,
    tol: float = 1e-6,
) -> ChiResult:
    """chi by direct oscillatory quadrature over the window."""
    value = abs(oscillatory_integral(signal, omega, window, tol=tol))
    return ChiResult(value, "quadrature", (float(window[0]), float(window[1])))


def chi_monochromatic(h0: float, nu: float, omega: float, t: float) -> ChiResult:
    """Rotating-wave closed form chi = h0*nu^2*(t/2)*|sinc(delta*t/2)|.

    delta = omega - nu; valid for |delta| << omega + nu (warns otherwise).
    The first zero sits at delta*t/2 = pi.
    """
    delta = omega - nu
    if abs(delta) > 0.1 * (omega + nu):
        warnings.warn(
            "rotating-wave form used outside its regime: "
            f"|omega-nu| = {abs(delta):.3g} vs omega+nu = {omega + nu:.3g}",
            stacklevel=2,
        )
    value = abs(h0 * nu**2 * (t / 2.0) * float(_sinc(delta * t / 2.0)))
    return ChiResult(value, "monochromatic_closed_form", (0.0, float(t)))


def chi_chirp_analytic(h0: float, k: float, omega: float) -> ChiResult:
    """Slow-chirp estimate chi = h0 * sqrt(2/k) * omega^(1/6).

    Equals h0*omega^2*tau/2 with tau the resonance crossing time. Warns when
    omega*tau is not large (fast sweep through resonance).
    """
    if k <= 0.0 or omega <= 0.0:
        raise ValueError("k and omega must be > 0")
    tau = resonance_crossing_time(k, omega)
    if omega * tau < 10.0:
        warnings.warn(
            f"slow-chirp estimate used with omega*tau = {omega * tau:.3g} "
            "(assumes omega*tau >> 1)",
            stacklevel=2,
        )
    value = h0 * math.sqrt(2.0 / k) * omega ** (1.0 / 6.0)
    return ChiResult(value, "chirp_analytic", None)


def chi_stationary_phase(
    chirp: ChirpSource,
    omega: float,
    window: tuple[float, float] | None = None,
) -> ChiResult:
    """Stationary-phase estimate of chi for a chirp sweeping through omega.

    Keeps the rotating-wave term of hddot*exp(i*omega*s) and expands its
    phase to second order about the instant s* where the chirp frequency
    crosses omega, leaving a Gaussian integral:

        chi ~ (A(s*) * omega^2 / 2) * sqrt(2*pi / (k * omega^(11/3))).

    Raises ChirpDomainError when there is no resonance crossing inside the
    window (or at all, for omega < nu0).
    """
    k = chirp.k
    s_star = resonance_time(chirp.nu0, k, omega)
    if window is None:
        window = chirp_window(chirp, omega)
    if not (window[0] <= s_star <= window[1]):
        raise ChirpDomainError(
            f"resonance crossing at s* = {s_star:.6g} s lies outside the "
            f"window {window}"
        )
    tau = resonance_crossing_time(k, omega)
    if omega * tau < 10.0:
        warnings.warn(
            f"stationary phase used with omega*tau = {omega * tau:.3g} "
            "(assumes omega*tau >> 1)",
            stacklevel=2,
        )
    amplitude = float(chirp.amplitude(s_star))
    phase_curvature = k * omega ** (11.0 / 3.0)  # |d nu/dt| at the crossing
    value = 0.5 * amplitude * omega**2 * math.sqrt(2.0 * math.pi / phase_curvature)
    return ChiResult(
        value, "stationary_phase", (float(window[0]), float(window[1]))
    )


def beta_prefactor(spec: DetectorSpec, omega: float | None = None) -> float:
    """Coupling prefactor (L/pi^2) * sqrt(M/(omega*hbar)) mapping chi to |beta|."""
    if omega is None:
        omega = mode_frequency(spec)
    return spec.length / math.pi**2 * math.sqrt(spec.mass / (omega * HBAR))


@dataclass(frozen=True)
class BetaAmplitude:
    """Coherent displacement imparted to the mode by a drive.

    Attributes
    ----------
    value : complex
        beta = -i * prefactor * integral of hddot(s) e^{i omega s} ds.
    detector : DetectorSpec
        Detector that received the drive.
    signal : StrainSignal
        The drive.
    chi : ChiResult
        The chi from which |beta| derives (same quadrature nodes).
    """

    value: complex
    detector: DetectorSpec
    signal: StrainSignal
    chi: ChiResult

    @property
    def magnitude(self) -> float:
        return abs(self.value)


def default_window(
    signal: StrainSignal, omega: float
) -> tuple[float, float]:
    """Natural integration window of a signal at drive frequency omega.

    Chirps use the resonance-crossing window; sampled strain uses its
    support. Monochromatic waves have no natural end, so a window must be
    given explicitly for them.
    """
    if isinstance(signal, ChirpSource):
        return chirp_window(signal, omega)
    if isinstance(signal, SampledStrain):
        return (signal.t0, signal.t_end)
    raise ValueError(
        "a monochromatic wave has no natural window; pass one explicitly"
    )


def displacement_beta(
    spec: DetectorSpec,
    signal: StrainSignal,
    window: tuple[float, float] | None = None,
    *,
    omega: float | None = None,
    tol: float = 1e-6,
) -> BetaAmplitude:
    """Complex coherent amplitude beta accumulated over the window.

    |beta| = (L/pi^2) sqrt(M/(omega hbar)) * chi with chi evaluated from the
    identical quadrature, so the two are consistent to machine precision.
    """
    if omega is None:
        omega = mode_frequency(spec)
    if window is None:
        window = default_window(signal, omega)
    integral = oscillatory_integral(signal, omega, window, tol=tol)
    chi = ChiResult(abs(integral), "quadrature", (float(window[0]), float(window[1])))
    beta = -1j * beta_prefactor(spec, omega) * integral
    return BetaAmplitude(value=beta, detector=spec, signal=signal, chi=chi)


def excitation_probability(beta: complex, n: int) -> float:
    """Probability of finding the mode in Fock state n after displacement beta.

    P_n = exp(-|beta|^2) |beta|^(2n) / n!  (Poisson in |beta|^2). The single
    excitation probability peaks at |beta| = 1 with value 1/e.
    """
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    b2 = abs(beta) ** 2
    if b2 == 0.0:
        return 1.0 if n == 0 else 0.0
    return math.exp(-b2 + n * math.log(b2) - math.lgamma(n + 1))


def optimal_mass(material: Material, chi, omega: float) -> float:
    """Detector mass maximizing the single-excitation probability.

    M = pi^2 * hbar * omega^3 / (v_s^2 * chi^2); feeding this mass back into
    `displacement_beta` with the same chi gives |beta| = 1. `chi` may be a
    float or a ChiResult.
    """
    chi_value = chi.value if isinstance(chi, ChiResult) else float(chi)
    if chi_value <= 0.0:
        raise ValueError("chi must be > 0 for a finite optimal mass")
    if omega <= 0.0:
        raise ValueError(f"omega must be > 0, got {omega}")
    return math.pi**2 * HBAR * omega**3 / (material.sound_speed**2 * chi_value**2)


def optimal_mass_chirp(
    material: Material, h0: float, chirp_mass: float, omega: float
) -> float:
    """Optimal mass for a slow binary chirp, using the analytic chi.

    Equals pi^2*hbar*k*omega^(8/3) / (2*v_s^2*h0^2); scales as omega^(8/3)
    and inversely with h0^2.
    """
    from .waveform import chirp_rate_k

    chi = chi_chirp_analytic(h0, chirp_rate_k(chirp_mass), omega)
    return optimal_mass(material, chi, omega)


def threshold_probability(
    spec: DetectorSpec, h0: float, nu: float, t: float
) -> float:
    """Excitation probability of a monochromatic drive in the rotating wave.

    P ~ (L^2/(4 pi^4)) (M/(omega hbar)) h0^2 nu^4 t^2 sinc^2((omega-nu) t/2).
    Exhibits the threshold behavior: negligible for nu well below the mode
    frequency at long times.
    """
    omega = mode_frequency(spec)
    env = float(_sinc((omega - nu) * t / 2.0))
    return (
        spec.length**2 / (4.0 * math.pi**4)
        * spec.mass / (omega * HBAR)
        * h0**2 * nu**4 * t**2 * env**2
    )


__all__ = [
    "BetaAmplitude",
    "ChiResult",
    "QuadratureConvergenceError",
    "beta_prefactor",
    "chi_chirp_analytic",
    "chi_monochromatic",
    "chi_quadrature",
    "chi_stationary_phase",
    "default_window",
    "displacement_beta",
    "excitation_probability",
    "optimal_mass",
    "optimal_mass_chirp",
    "oscillatory_integral",
    "threshold_probability",
]
