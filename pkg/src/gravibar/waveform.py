"""Gravitational-wave drive signals.

Three strain models are supported: a monochromatic wave, a binary-inspiral
chirp, and a sampled strain series loaded from disk. Every signal exposes
h(t) together with its second time derivative, which is what drives the
resonator mode. Angular frequencies are in rad/s, times in seconds, strain
is dimensionless.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple, Union

import numpy as np

from .constants import G, C_LIGHT, SOLAR_MASS


class StrainFormatError(ValueError):
    """Raised for malformed or non-uniform strain series files."""


class ChirpDomainError(ValueError):
    """Raised when a chirp is evaluated at or beyond coalescence."""


def chirp_rate_k(chirp_mass: float) -> float:
    """Chirp rate constant k = (48/5) * (G*M_c/(2 c^3))^(5/3).

    The instantaneous angular frequency of the emitted wave obeys
    dnu/dt = k * nu^(11/3); `chirp_mass` is in kg.
    """
    if chirp_mass <= 0.0:
        raise ValueError(f"chirp_mass must be > 0, got {chirp_mass}")
    return (48.0 / 5.0) * (G * chirp_mass / (2.0 * C_LIGHT**3)) ** (5.0 / 3.0)


def coalescence_time(nu0: float, k: float) -> float:
    """Time at which the frequency of a chirp starting at nu0 diverges."""
    return 3.0 / (8.0 * k * nu0 ** (8.0 / 3.0))


def chirp_frequency(nu0: float, k: float, t):
    """Instantaneous angular frequency nu(t) = (nu0^(-8/3) - (8/3) k t)^(-3/8).

    Accepts scalar or array `t`; raises ChirpDomainError at or beyond the
    coalescence time.
    """
    t = np.asarray(t, dtype=float)
    base = nu0 ** (-8.0 / 3.0) - (8.0 / 3.0) * k * t
    if np.any(base <= 0.0):
        raise ChirpDomainError(
            f"chirp evaluated at/after coalescence t_c = {coalescence_time(nu0, k):.6g} s"
        )
    out = base ** (-3.0 / 8.0)
    return float(out) if out.ndim == 0 else out


def chirp_phase(nu0: float, k: float, t):
    """Accumulated phase phi(t) = (3/(5k)) (nu0^(-5/3) - nu(t)^(-5/3)), phi(0)=0.

    Evaluated in a cancellation-free form so the constant-frequency limit
    k -> 0 recovers nu0*t to machine precision.
    """
    if k == 0.0:
        t = np.asarray(t, dtype=float)
        out = nu0 * t
        return float(out) if out.ndim == 0 else out
    t = np.asarray(t, dtype=float)
    eps = (8.0 / 3.0) * k * nu0 ** (8.0 / 3.0) * t
    if np.any(eps >= 1.0):
        raise ChirpDomainError(
            f"chirp evaluated at/after coalescence t_c = {coalescence_time(nu0, k):.6g} s"
        )
    # nu(t)^(-5/3) = nu0^(-5/3) * (1-eps)^(5/8)
    out = (3.0 / (5.0 * k)) * nu0 ** (-5.0 / 3.0) * (
        -np.expm1((5.0 / 8.0) * np.log1p(-eps))
    )
    return float(out) if out.ndim == 0 else out


def resonance_crossing_time(k: float, omega: float) -> float:
    """Duration tau = 2*sqrt(2/k)*omega^(-11/6) the chirp spends on resonance."""
    if k <= 0.0 or omega <= 0.0:
        raise ValueError("k and omega must be > 0")
    return 2.0 * math.sqrt(2.0 / k) * omega ** (-11.0 / 6.0)


def resonance_time(nu0: float, k: float, omega: float) -> float:
    """Time at which the chirp frequency reaches `omega`.

    Closed-form inversion of the frequency evolution. Raises
    ChirpDomainError when omega < nu0 (the sweep starts above resonance).
    """
    if omega < nu0:
        raise ChirpDomainError(
            f"resonance omega = {omega:.6g} rad/s is below the initial "
            f"frequency nu0 = {nu0:.6g} rad/s"
        )
    return (3.0 / (8.0 * k)) * (nu0 ** (-8.0 / 3.0) - omega ** (-8.0 / 3.0))


@dataclass(frozen=True)
class MonochromaticWave:
    """h(t) = h0 * sin(nu*t + phi0), supported for all t."""

    h0: float
    nu: float
    phi0: float = 0.0

    def __post_init__(self) -> None:
        if self.h0 < 0.0:
            raise ValueError(f"h0 must be >= 0, got {self.h0}")
        if self.nu <= 0.0:
            raise ValueError(f"nu must be > 0, got {self.nu}")


@dataclass(frozen=True)
class ChirpSource:
    """Binary-inspiral chirp h(t) = A(t)*sin(phi(t)) for t in [0, t_c).

    `h0` is the amplitude at resonance. With the default constant amplitude
    model A(t) = h0 everywhere. The "nu_two_thirds" model scales
    A(t) = h0 * (nu(t)/amplitude_ref)^(2/3); set `amplitude_ref` to the
    detector resonance so that the amplitude is h0 there (defaults to nu0).

    Attributes
    ----------
    chirp_mass : float
        Binary chirp mass [kg]; see `from_solar_masses`.
    h0 : float
        Strain amplitude at resonance.
    nu0 : float
        Initial angular frequency of the wave [rad/s].
    amplitude_model : str
        "constant" or "nu_two_thirds".
    amplitude_ref : float or None
        Reference angular frequency for the two-thirds model [rad/s].
    """

    chirp_mass: float
    h0: float
    nu0: float
    amplitude_model: str = "constant"
    amplitude_ref: float | None = None

    def __post_init__(self) -> None:
        if self.chirp_mass <= 0.0:
            raise ValueError(f"chirp_mass must be > 0, got {self.chirp_mass}")
        if self.h0 < 0.0:
            raise ValueError(f"h0 must be >= 0, got {self.h0}")
        if self.nu0 <= 0.0:
            raise ValueError(f"nu0 must be > 0, got {self.nu0}")
        if self.amplitude_model not in ("constant", "nu_two_thirds"):
            raise ValueError(
                f"amplitude_model must be 'constant' or 'nu_two_thirds', "
                f"got {self.amplitude_model!r}"
            )

    @classmethod
    def from_solar_masses(cls, chirp_mass_msun: float, **kwargs) -> "ChirpSource":
        return cls(chirp_mass=chirp_mass_msun * SOLAR_MASS, **kwargs)

    @property
    def k(self) -> float:
        return chirp_rate_k(self.chirp_mass)

    @property
    def coalescence(self) -> float:
        return coalescence_time(self.nu0, self.k)

    def amplitude(self, t):
        """Strain envelope A(t) for times inside the support."""
        if self.amplitude_model == "constant":
            return np.broadcast_to(self.h0, np.shape(t)).astype(float) if np.ndim(t) else self.h0
        ref = self.amplitude_ref if self.amplitude_ref is not None else self.nu0
        return self.h0 * (chirp_frequency(self.nu0, self.k, t) / ref) ** (2.0 / 3.0)


@dataclass(frozen=True)
class SampledStrain:
    """Uniformly sampled strain series, zero outside its support.

    Attributes
    ----------
    t0 : float
        Time of the first sample [s].
    dt : float
        Sample spacing [s].
    h : np.ndarray
        Strain samples; at least 3 are required so second differences exist.
    """

    t0: float
    dt: float
    h: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(self, "h", np.asarray(self.h, dtype=float))
        if self.dt <= 0.0:
            raise ValueError(f"dt must be > 0, got {self.dt}")
        if self.h.ndim != 1 or self.h.size < 3:
            raise ValueError("need at least 3 strain samples")

    @property
    def t_end(self) -> float:
        return self.t0 + (self.h.size - 1) * self.dt

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.h.size)

    @cached_property
    def hddot_samples(self) -> np.ndarray:
        """Second differences of the samples; one-sided at the edges."""
        h, dt2 = self.h, self.dt**2
        out = np.empty_like(h)
        out[1:-1] = (h[:-2] - 2.0 * h[1:-1] + h[2:]) / dt2
        if h.size >= 4:
            out[0] = (2.0 * h[0] - 5.0 * h[1] + 4.0 * h[2] - h[3]) / dt2
            out[-1] = (2.0 * h[-1] - 5.0 * h[-2] + 4.0 * h[-3] - h[-4]) / dt2
        else:
            out[0] = out[1]
            out[-1] = out[1]
        return out


StrainSignal = Union[MonochromaticWave, ChirpSource, SampledStrain]


class StrainSample(NamedTuple):
    """Value of a strain signal at one instant: h, its second derivative,
    and whether the instant lies inside the signal's support."""

    h: float
    hddot: float
    in_support: bool


def strain_sample(signal: StrainSignal, t: float) -> StrainSample:
    """Evaluate `(h, hddot)` of a signal at time `t`.

    Outside the signal's support the sample is (0, 0) with
    ``in_support=False``. For the chirp the second derivative uses the
    locally-monochromatic form hddot = -nu(t)^2 h(t); `second_derivative`
    offers a finite-difference cross-check.
    """
    if isinstance(signal, MonochromaticWave):
        h = signal.h0 * math.sin(signal.nu * t + signal.phi0)
        return StrainSample(h, -signal.nu**2 * h, True)
    if isinstance(signal, ChirpSource):
        if t < 0.0 or t >= signal.coalescence:
            return StrainSample(0.0, 0.0, False)
        nu = chirp_frequency(signal.nu0, signal.k, t)
        h = signal.amplitude(t) * math.sin(chirp_phase(signal.nu0, signal.k, t))
        return StrainSample(h, -(nu**2) * h, True)
    if isinstance(signal, SampledStrain):
        if t < signal.t0 or t > signal.t_end:
            return StrainSample(0.0, 0.0, False)
        times = signal.times
        h = float(np.interp(t, times, signal.h))
        hddot = float(np.interp(t, times, signal.hddot_samples))
        return StrainSample(h, hddot, True)
    raise TypeError(f"not a strain signal: {signal!r}")


def strain_samples(signal: StrainSignal, ts: np.ndarray):
    """Vectorized `strain_sample` over an array of times.

    Returns arrays (h, hddot, in_support).
    """
    ts = np.asarray(ts, dtype=float)
    if isinstance(signal, MonochromaticWave):
        h = signal.h0 * np.sin(signal.nu * ts + signal.phi0)
        return h, -signal.nu**2 * h, np.ones(ts.shape, dtype=bool)
    if isinstance(signal, ChirpSource):
        ok = (ts >= 0.0) & (ts < signal.coalescence)
        h = np.zeros(ts.shape)
        hddot = np.zeros(ts.shape)
        if np.any(ok):
            tin = ts[ok]
            nu = chirp_frequency(signal.nu0, signal.k, tin)
            hin = signal.amplitude(tin) * np.sin(
                chirp_phase(signal.nu0, signal.k, tin)
            )
            h[ok] = hin
            hddot[ok] = -(nu**2) * hin
        return h, hddot, ok
    if isinstance(signal, SampledStrain):
        ok = (ts >= signal.t0) & (ts <= signal.t_end)
        times = signal.times
        h = np.where(ok, np.interp(ts, times, signal.h), 0.0)
        hddot = np.where(ok, np.interp(ts, times, signal.hddot_samples), 0.0)
        return h, hddot, ok
    raise TypeError(f"not a strain signal: {signal!r}")


def second_derivative(signal: StrainSignal, t: float, dt: float) -> float:
    """Finite-difference second derivative of h at `t` (5-point stencil).

    Cross-check for the analytic hddot returned by `strain_sample`.
    """
    offs = np.array([-2.0, -1.0, 0.0, 1.0, 2.0]) * dt
    coef = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / (12.0 * dt**2)
    vals = [strain_sample(signal, t + o).h for o in offs]
    return float(np.dot(coef, vals))


def chirp_window(
    chirp: ChirpSource, omega: float, *, half_width: float = 5.0
) -> tuple[float, float]:
    """Default integration window around the resonance crossing.

    [t_res - half_width*tau, t_res + half_width*tau], clipped to the chirp's
    support and to frequencies below 8*omega so the integrand stays
    resolvable near coalescence.
    """
    k = chirp.k
    t_res = resonance_time(chirp.nu0, k, omega)
    tau = resonance_crossing_time(k, omega)
    t_hi_freq = resonance_time(chirp.nu0, k, 8.0 * omega)
    t0 = max(0.0, t_res - half_width * tau)
    t1 = min(t_res + half_width * tau, t_hi_freq, chirp.coalescence * (1.0 - 1e-12))
    return (t0, t1)


def load_strain_series(path: str) -> SampledStrain:
    """Read a two-column ASCII strain file (time [s], strain).

    Lines starting with '#' and blank lines are ignored. The time column
    must be uniformly spaced to within 1e-6 relative jitter; the series
    timestep is the median spacing.
    """
    times: list[float] = []
    values: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if len(parts) != 2:
                raise StrainFormatError(
                    f"{path}:{lineno}: expected two columns, got {len(parts)}"
                )
            try:
                t, h = float(parts[0]), float(parts[1])
            except ValueError:
                raise StrainFormatError(
                    f"{path}:{lineno}: non-numeric value in {line!r}"
                ) from None
            times.append(t)
            values.append(h)
    if len(times) < 3:
        raise StrainFormatError(
            f"{path}: need at least 3 samples, got {len(times)}"
        )
    t_arr = np.asarray(times)
    spacings = np.diff(t_arr)
    dt = float(np.median(spacings))
    if dt <= 0.0 or np.any(np.abs(spacings - dt) > 1e-6 * dt):
        raise StrainFormatError(
            f"{path}: time column is not uniformly spaced "
            f"(median dt = {dt:.6g} s, max deviation "
            f"{np.max(np.abs(spacings - dt)):.3g} s)"
        )
    return SampledStrain(t0=float(t_arr[0]), dt=dt, h=np.asarray(values))


def save_strain_series(path: str, series: SampledStrain) -> None:
    """Write a SampledStrain in the two-column format `load_strain_series` reads."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("# time_s strain\n")
        for t, h in zip(series.times, series.h):
            fh.write(f"{float(t)!r} {float(h)!r}\n")


__all__ = [
    "ChirpDomainError",
    "ChirpSource",
    "MonochromaticWave",
    "SampledStrain",
    "StrainFormatError",
    "StrainSample",
    "StrainSignal",
    "chirp_frequency",
    "chirp_phase",
    "chirp_rate_k",
    "chirp_window",
    "coalescence_time",
    "load_strain_series",
    "resonance_crossing_time",
    "resonance_time",
    "save_strain_series",
    "second_derivative",
    "strain_sample",
    "strain_samples",
]
