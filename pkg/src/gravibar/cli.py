"""Command-line front end: config parsing, subcommands, serialized outputs.

Subcommands::

    gravibar rates --config run.ini [--out DIR]
    gravibar chi --config run.ini [--out DIR]
    gravibar optimal-mass --config run.ini [--out DIR]
    gravibar simulate --config run.ini [--out DIR] [--seed N] [--n-traj N]
    gravibar sensitivity --config run.ini [--out DIR] [--reference PATH]
    gravibar lattice-verify [--config run.ini] [--out DIR]

The config file is INI-style with [detector], [source], [measurement],
[output] and optional [sensitivity]/[lattice] sections; '#' starts a
comment. Every run writes a metadata.json with the fully resolved
configuration, constants and seeds, sufficient to reproduce the outputs
byte for byte. All CSV floats use shortest round-trip formatting.
"""

from __future__ import annotations

import argparse
import configparser
import dataclasses
import json
import math
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import __version__
from .constants import CONSTANTS, SOLAR_MASS
from .detector import (
    DetectorSpec,
    Material,
    fock_lifetime,
    gamma_spontaneous,
    gamma_stimulated,
    gamma_thermal,
    get_material,
    load_materials,
    mode_frequency,
    thermal_occupation,
)
from .dynamics import (
    beta_prefactor,
    chi_chirp_analytic,
    chi_monochromatic,
    chi_quadrature,
    chi_stationary_phase,
    displacement_beta,
    excitation_probability,
    optimal_mass,
)
from .lattice import (
    ChainSpec,
    completeness_residual,
    continuum_coupling,
    coupling_coefficient,
    effective_mode_mass,
    evolve_chain,
    mode_coherent_amplitude,
    normal_mode_frequencies,
)
from .measurement import MeasurementConfig, detect_jump, run_trajectory
from .sensitivity import characteristic_strain, sensitivity_curve
from .waveform import (
    ChirpSource,
    MonochromaticWave,
    SampledStrain,
    StrainSignal,
    chirp_window,
    load_strain_series,
)


class ConfigError(ValueError):
    """Raised for malformed or inconsistent run configuration files."""


_SECTION_KEYS = {
    "detector": {
        "material", "density", "sound_speed", "length", "frequency_hz",
        "radius", "mass", "mode_index", "quality", "temperature",
    },
    "source": {
        "type", "h0", "frequency_hz", "chirp_mass_msun", "nu0_hz",
        "amplitude_model", "path", "gw_start", "window_start", "window_end",
    },
    "measurement": {
        "dt", "t_m", "t_meas", "dim", "kappa", "kappa_scaling", "thermal",
        "seed", "n_traj", "duration",
    },
    "output": {"directory", "stride"},
    "sensitivity": {"f_min_hz", "f_max_hz", "n_points"},
    "lattice": {"n_values"},
}

_UNITS = {
    "density": "kg/m^3", "sound_speed": "m/s", "length": "m",
    "frequency_hz": "Hz", "radius": "m", "mass": "kg", "quality": "1",
    "temperature": "K", "h0": "strain", "chirp_mass_msun": "solar masses",
    "nu0_hz": "Hz", "gw_start": "s", "window_start": "s", "window_end": "s",
    "dt": "s", "t_m": "s", "t_meas": "s", "kappa": "1", "duration": "s",
    "f_min_hz": "Hz", "f_max_hz": "Hz",
}


def _fmt(x: float) -> str:
    return repr(float(x))


def _type_error(section: str, key: str, raw: str) -> ConfigError:
    unit = _UNITS.get(key)
    hint = f" (expected a number in {unit})" if unit else " (expected a number)"
    return ConfigError(f"[{section}] {key} = {raw!r} is not valid{hint}")


class _Section:
    """Validated view of one config section tracking resolved values."""

    def __init__(self, name: str, proxy, resolved: dict):
        self.name = name
        self.proxy = proxy
        self.resolved = resolved.setdefault(name, {})

    def has(self, key: str) -> bool:
        return self.proxy is not None and key in self.proxy

    def raw(self, key: str, default=None):
        if not self.has(key):
            return default
        return self.proxy[key].split("#", 1)[0].strip()

    def record(self, key: str, value):
        self.resolved[key] = value
        return value

    def floatv(self, key: str, default=None, required=False):
        raw = self.raw(key)
        if raw is None or raw == "":
            if required:
                raise ConfigError(f"[{self.name}] is missing required key {key!r}")
            return self.record(key, default)
        try:
            return self.record(key, float(raw))
        except ValueError:
            raise _type_error(self.name, key, raw) from None

    def intv(self, key: str, default=None, required=False):
        raw = self.raw(key)
        if raw is None or raw == "":
            if required:
                raise ConfigError(f"[{self.name}] is missing required key {key!r}")
            return self.record(key, default)
        try:
            return self.record(key, int(raw))
        except ValueError:
            raise _type_error(self.name, key, raw) from None

    def strv(self, key: str, default=None, required=False, choices=None):
        raw = self.raw(key)
        if raw is None or raw == "":
            if required:
                raise ConfigError(f"[{self.name}] is missing required key {key!r}")
            return self.record(key, default)
        if choices is not None and raw not in choices:
            raise ConfigError(
                f"[{self.name}] {key} = {raw!r} must be one of {sorted(choices)}"
            )
        return self.record(key, raw)


@dataclass
class RunConfig:
    """Fully resolved run configuration."""

    detector: DetectorSpec
    signal: StrainSignal | None
    measurement: MeasurementConfig
    duration: float
    gw_start: float
    window: tuple[float, float] | None
    n_traj: int
    out_dir: str
    source_type: str | None
    source_h0: float | None
    mass_resolved_optimal: bool
    sensitivity_grid: np.ndarray
    lattice_n_values: tuple[int, ...]
    resolved: dict


def _build_signal(sec: _Section, omega_hint: float | None):
    kind = sec.strv(
        "type", required=True, choices={"monochromatic", "chirp", "file"}
    )
    if kind == "monochromatic":
        h0 = sec.floatv("h0", required=True)
        freq = sec.floatv("frequency_hz", required=True)
        return MonochromaticWave(h0=h0, nu=2.0 * math.pi * freq)
    if kind == "chirp":
        h0 = sec.floatv("h0", required=True)
        mc = sec.floatv("chirp_mass_msun", required=True)
        nu0 = sec.floatv("nu0_hz", required=True)
        model = sec.strv(
            "amplitude_model", default="constant",
            choices={"constant", "nu_two_thirds"},
        )
        ref = omega_hint if model == "nu_two_thirds" else None
        return ChirpSource(
            chirp_mass=mc * SOLAR_MASS,
            h0=h0,
            nu0=2.0 * math.pi * nu0,
            amplitude_model=model,
            amplitude_ref=ref,
        )
    path = sec.strv("path", required=True)
    return load_strain_series(path)


def _signal_chi(signal, window, omega) -> float:
    """chi of a configured source at omega, for optimal-mass resolution."""
    if isinstance(signal, ChirpSource):
        return chi_chirp_analytic(signal.h0, signal.k, omega).value
    if isinstance(signal, MonochromaticWave):
        if window is None:
            raise ConfigError(
                "mass = optimal with a monochromatic source needs "
                "[source] window_start/window_end"
            )
        return chi_monochromatic(
            signal.h0, signal.nu, omega, window[1] - window[0]
        ).value
    return chi_quadrature(signal, omega, (signal.t0, signal.t_end)).value


def parse_config(path: str, materials_path: str | None = None) -> RunConfig:
    """Parse and validate an INI run configuration.

    Unknown keys, missing required keys and type mismatches raise
    ConfigError naming the key and section. All applied defaults are
    recorded and end up in the run metadata.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    if not parser.read(path):
        raise ConfigError(f"config file not found: {path}")

    for name in parser.sections():
        if name not in _SECTION_KEYS:
            raise ConfigError(f"unknown section [{name}]")
        unknown = set(parser[name]) - _SECTION_KEYS[name]
        if unknown:
            raise ConfigError(
                f"unknown key(s) {sorted(unknown)} in section [{name}]"
            )

    resolved: dict = {"config_path": os.path.abspath(path)}
    extra_materials = load_materials(materials_path) if materials_path else None

    def section(name: str) -> _Section:
        proxy = parser[name] if parser.has_section(name) else None
        return _Section(name, proxy, resolved)

    det = section("detector")
    if not parser.has_section("detector"):
        raise ConfigError("missing required section [detector]")

    if det.has("material"):
        material = get_material(det.strv("material"), extra_materials)
    elif det.has("density") and det.has("sound_speed"):
        material = Material(
            "custom",
            density=det.floatv("density", required=True),
            sound_speed=det.floatv("sound_speed", required=True),
        )
    else:
        raise ConfigError(
            "[detector] needs either material = <name> or inline "
            "density/sound_speed"
        )
    det.record("material_density", material.density)
    det.record("material_sound_speed", material.sound_speed)

    mode_index = det.intv("mode_index", default=1)
    quality = det.floatv("quality", default=1e10)
    temperature = det.floatv("temperature", default=1e-3)
    radius = det.floatv("radius", required=True)

    if det.has("length") and det.has("frequency_hz"):
        raise ConfigError("[detector] length and frequency_hz are exclusive")
    if det.has("length"):
        length = det.floatv("length", required=True)
    elif det.has("frequency_hz"):
        freq = det.floatv("frequency_hz", required=True)
        length = mode_index * math.pi * material.sound_speed / (
            2.0 * math.pi * freq
        )
        det.record("length", length)
    else:
        raise ConfigError("[detector] needs length or frequency_hz")

    omega = mode_index * math.pi * material.sound_speed / length

    src = section("source")
    signal = None
    source_type = None
    source_h0 = None
    gw_start = 0.0
    window = None
    if parser.has_section("source"):
        signal = _build_signal(src, omega)
        source_type = src.resolved.get("type")
        source_h0 = getattr(signal, "h0", None)
        gw_start = src.floatv("gw_start", default=0.0)
        w0 = src.floatv("window_start", default=None)
        w1 = src.floatv("window_end", default=None)
        if (w0 is None) != (w1 is None):
            raise ConfigError(
                "[source] window_start and window_end must be given together"
            )
        if w0 is not None:
            window = (w0, w1)
        elif isinstance(signal, ChirpSource):
            window = chirp_window(signal, omega)
            src.record("window_start", window[0])
            src.record("window_end", window[1])

    mass_raw = det.raw("mass")
    mass_resolved_optimal = False
    if mass_raw is None or mass_raw == "":
        spec = DetectorSpec(
            material=material, length=length, radius=radius,
            mode_index=mode_index, quality=quality, temperature=temperature,
        )
        det.record("mass", spec.mass)
    elif mass_raw == "optimal":
        if signal is None:
            raise ConfigError("[detector] mass = optimal requires a [source]")
        chi = _signal_chi(signal, window, omega)
        mass = optimal_mass(material, chi, omega)
        mass_resolved_optimal = True
        det.record("mass", mass)
        det.record("mass_resolution", "optimal")
        spec = DetectorSpec(
            material=material, length=length, radius=radius, mass=mass,
            mode_index=mode_index, quality=quality, temperature=temperature,
            geometry_mass_check=False,
        )
    else:
        try:
            mass = float(mass_raw)
        except ValueError:
            raise ConfigError(
                f"[detector] mass = {mass_raw!r} must be a number in kg "
                "or 'optimal'"
            ) from None
        det.record("mass", mass)
        spec = DetectorSpec(
            material=material, length=length, radius=radius, mass=mass,
            mode_index=mode_index, quality=quality, temperature=temperature,
            geometry_mass_check=False,
        )

    meas = section("measurement")
    out = section("output")
    thermal = meas.strv("thermal", default="off", choices={"on", "off"})
    thermal_rate = gamma_thermal(spec) if thermal == "on" else 0.0
    meas.record("thermal_rate", thermal_rate)
    cfg = MeasurementConfig(
        dt=meas.floatv("dt", default=1e-3),
        t_m=meas.floatv("t_m", default=2.0),
        t_meas=meas.floatv("t_meas", default=40.0),
        dim=meas.intv("dim", default=30),
        kappa=meas.floatv("kappa", default=0.0),
        kappa_scaling=meas.strv(
            "kappa_scaling", default="literal", choices={"literal", "diffusive"}
        ),
        thermal_rate=thermal_rate,
        seed=meas.intv("seed", default=0),
        record_stride=out.intv("stride", default=3),
    )
    duration = meas.floatv("duration", default=cfg.t_meas)
    n_traj = meas.intv("n_traj", default=1)
    out_dir = out.strv("directory", default="out")

    sens = section("sensitivity")
    f_min = sens.floatv("f_min_hz", default=50.0)
    f_max = sens.floatv("f_max_hz", default=2000.0)
    n_pts = sens.intv("n_points", default=40)
    if f_max <= f_min:
        raise ConfigError("[sensitivity] f_max_hz must exceed f_min_hz")
    grid = np.geomspace(f_min, f_max, n_pts)

    lat = section("lattice")
    raw_ns = lat.strv("n_values", default="19,39,79,159")
    try:
        n_values = tuple(int(v) for v in raw_ns.split(","))
    except ValueError:
        raise _type_error("lattice", "n_values", raw_ns) from None
    lat.record("n_values", list(n_values))

    resolved["constants"] = dataclasses.asdict(CONSTANTS)
    resolved["version"] = __version__
    return RunConfig(
        detector=spec,
        signal=signal,
        measurement=cfg,
        duration=duration,
        gw_start=gw_start,
        window=window,
        n_traj=n_traj,
        out_dir=out_dir,
        source_type=source_type,
        source_h0=source_h0,
        mass_resolved_optimal=mass_resolved_optimal,
        sensitivity_grid=grid,
        lattice_n_values=n_values,
        resolved=resolved,
    )


class _OutputSet:
    """Tracks files written by a run so failures can clean up."""

    def __init__(self, directory: str):
        self.directory = directory
        self.paths: list[str] = []
        os.makedirs(directory, exist_ok=True)

    def open(self, name: str):
        path = os.path.join(self.directory, name)
        self.paths.append(path)
        return open(path, "w", encoding="utf-8", newline="\n")

    def discard_all(self) -> None:
        for path in self.paths:
            try:
                os.remove(path)
            except OSError:
                pass


def _write_metadata(outputs: _OutputSet, run: RunConfig, command: str, **extra):
    payload = {
        "command": command,
        "resolved_config": run.resolved,
        "seed": run.measurement.seed,
        **extra,
    }
    with outputs.open("metadata.json") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def cmd_rates(run: RunConfig, outputs: _OutputSet) -> int:
    spec = run.detector
    omega = mode_frequency(spec)
    nbar = thermal_occupation(spec.temperature, omega)
    rows = [
        ("mode_frequency_hz", omega / (2 * math.pi)),
        ("gamma_spontaneous_hz", gamma_spontaneous(spec)),
        ("gamma_thermal_hz", gamma_thermal(spec)),
        ("thermal_occupation", nbar),
        ("fock_lifetime_s", fock_lifetime(spec)),
        ("characteristic_strain", characteristic_strain(spec)),
    ]
    if run.source_h0 is not None:
        rows.insert(2, ("gamma_stimulated_hz", gamma_stimulated(spec, run.source_h0)))
    with outputs.open("rates.csv") as fh:
        fh.write("quantity,value\n")
        for name, value in rows:
            fh.write(f"{name},{_fmt(value)}\n")
    width = max(len(name) for name, _ in rows)
    for name, value in rows:
        print(f"{name:<{width}}  {value:.6g}")
    _write_metadata(outputs, run, "rates")
    return 0


def _chi_methods(run: RunConfig, omega: float):
    signal = run.signal
    if signal is None:
        raise ConfigError("chi requires a [source] section")
    window = run.window
    if window is None:
        if isinstance(signal, MonochromaticWave):
            window = (0.0, run.duration - run.gw_start)
        elif isinstance(signal, SampledStrain):
            window = (signal.t0, signal.t_end)
    results = [chi_quadrature(signal, omega, window)]
    if isinstance(signal, MonochromaticWave):
        results.append(
            chi_monochromatic(signal.h0, signal.nu, omega, window[1] - window[0])
        )
    if isinstance(signal, ChirpSource):
        results.append(chi_stationary_phase(signal, omega, window))
        results.append(chi_chirp_analytic(signal.h0, signal.k, omega))
    return results


def cmd_chi(run: RunConfig, outputs: _OutputSet) -> int:
    spec = run.detector
    omega = mode_frequency(spec)
    pref = beta_prefactor(spec, omega)
    results = _chi_methods(run, omega)
    with outputs.open("chi.csv") as fh:
        fh.write("method,chi,beta_mag,p0,p1,p2,p3\n")
        for res in results:
            beta = pref * res.value
            probs = [excitation_probability(beta, n) for n in range(4)]
            fh.write(
                f"{res.method},{_fmt(res.value)},{_fmt(beta)},"
                + ",".join(_fmt(p) for p in probs) + "\n"
            )
            print(
                f"{res.method:<28} chi = {res.value:.6g}  |beta| = {beta:.6g}"
            )
    _write_metadata(outputs, run, "chi")
    return 0


def cmd_optimal_mass(run: RunConfig, outputs: _OutputSet) -> int:
    spec = run.detector
    omega = mode_frequency(spec)
    if run.signal is None:
        raise ConfigError("optimal-mass requires a [source] section")
    chi = _signal_chi(run.signal, run.window, omega)
    mass = optimal_mass(spec.material, chi, omega)
    tuned = DetectorSpec(
        material=spec.material, length=spec.length, radius=spec.radius,
        mass=mass, mode_index=spec.mode_index, quality=spec.quality,
        temperature=spec.temperature, geometry_mass_check=False,
    )
    beta = beta_prefactor(tuned, omega) * chi
    with outputs.open("optimal_mass.csv") as fh:
        fh.write("quantity,value\n")
        fh.write(f"optimal_mass_kg,{_fmt(mass)}\n")
        fh.write(f"chi,{_fmt(chi)}\n")
        fh.write(f"beta_mag,{_fmt(beta)}\n")
    print(f"optimal mass = {mass:.6g} kg  (|beta| = {beta:.6g})")
    _write_metadata(outputs, run, "optimal-mass")
    return 0


def cmd_simulate(run: RunConfig, outputs: _OutputSet) -> int:
    spec = run.detector
    children = np.random.SeedSequence(run.measurement.seed).spawn(run.n_traj)
    sums = None
    times = None
    n_detected = 0
    for k, child in enumerate(children):
        record = run_trajectory(
            spec, run.signal, run.measurement,
            duration=run.duration, gw_start=run.gw_start, window=run.window,
            rng=np.random.default_rng(child),
        )
        jumps = detect_jump(record)
        if jumps:
            n_detected += 1
        with outputs.open(f"trajectory_{k}.csv") as fh:
            fh.write("time,r,rho00,rho11,rho22\n")
            for row in zip(
                record.times, record.readout, record.rho00, record.rho11,
                record.rho22,
            ):
                fh.write(",".join(_fmt(v) for v in row) + "\n")
        with outputs.open(f"events_{k}.csv") as fh:
            fh.write("time,kind\n")
            for t, kind in sorted(record.events + jumps):
                fh.write(f"{_fmt(t)},{kind}\n")
        stack = np.vstack([record.rho00, record.rho11, record.rho22])
        sums = stack if sums is None else sums + stack
        times = record.times
    with outputs.open("summary.csv") as fh:
        fh.write("time,mean_rho00,mean_rho11,mean_rho22\n")
        for i, t in enumerate(times):
            fh.write(
                f"{_fmt(t)},"
                + ",".join(_fmt(v / run.n_traj) for v in sums[:, i]) + "\n"
            )
    fraction = n_detected / run.n_traj
    print(
        f"{run.n_traj} trajectories, {n_detected} detected jump(s) "
        f"(fraction {fraction:.3g})"
    )
    _write_metadata(
        outputs, run, "simulate",
        n_traj=run.n_traj, n_detected=n_detected, detection_fraction=fraction,
    )
    return 0


def cmd_sensitivity(run: RunConfig, outputs: _OutputSet, reference: str | None) -> int:
    points = sensitivity_curve(run.detector, run.sensitivity_grid)
    with outputs.open("sensitivity.csv") as fh:
        fh.write("frequency_hz,h_c\n")
        for p in points:
            fh.write(f"{_fmt(p.frequency)},{_fmt(p.h_c)}\n")
    if reference is not None:
        table = np.loadtxt(reference, ndmin=2)
        if table.shape[1] < 2:
            raise ConfigError(
                f"reference table {reference} needs two columns "
                "(frequency_hz, h_c)"
            )
        with outputs.open("reference.csv") as fh:
            fh.write("frequency_hz,h_c\n")
            for row in table:
                fh.write(f"{_fmt(row[0])},{_fmt(row[1])}\n")
    print(
        f"sensitivity curve with {len(points)} points for "
        f"{run.detector.material.name}"
    )
    _write_metadata(outputs, run, "sensitivity")
    return 0


def _lattice_checks(n_values: tuple[int, ...]):
    """Run the chain-vs-continuum verification suite.

    Returns (name, measured, bound, passed) rows.
    """
    from .detector import DetectorSpec as _Spec

    material = Material("reference", density=1000.0, sound_speed=10.0)
    spec = _Spec.from_frequency(material, 2 * math.pi, radius=0.1)

    rows = []
    disp_errors, coup_errors = [], []
    for n in n_values:
        chain = ChainSpec.from_detector(spec, n)
        omega1 = float(normal_mode_frequencies(chain)[1])
        continuum = math.pi * chain.sound_speed / chain.length
        disp_errors.append(abs(omega1 - continuum) / omega1)
        c1 = coupling_coefficient(chain, 1)
        coup_errors.append(abs(c1 - continuum_coupling(chain, 1)) / abs(
            continuum_coupling(chain, 1)
        ))
    logn = np.log(np.asarray(n_values, dtype=float))
    disp_order = -float(np.polyfit(logn, np.log(disp_errors), 1)[0])
    coup_order = -float(np.polyfit(logn, np.log(coup_errors), 1)[0])
    rows.append(("dispersion_error_max", max(disp_errors),
                 5.0 / min(n_values) ** 2, max(disp_errors) <= 5.0 / min(n_values) ** 2))
    rows.append(("dispersion_order", disp_order, 1.0, disp_order >= 1.0))
    rows.append(("coupling_order", coup_order, 1.0, coup_order >= 1.0))

    chain = ChainSpec.from_detector(spec, max(n_values))
    mass_err = abs(
        effective_mode_mass(chain) - chain.total_mass / 2.0
    ) / (chain.total_mass / 2.0)
    rows.append(("effective_mass_error", mass_err, 1e-10, mass_err < 1e-10))
    residual = completeness_residual(chain)
    rows.append(("completeness_residual", residual, 1e-10, residual < 1e-10))

    chain = ChainSpec.from_detector(spec, 199)
    omega = mode_frequency(spec)
    t_end = 40 * 2 * math.pi / omega
    wave = MonochromaticWave(h0=1e-3, nu=omega)
    traj = evolve_chain(chain, wave, (0.0, t_end), record_stride=100)
    alpha = abs(
        mode_coherent_amplitude(chain, 1, traj.chi[1][-1], traj.chi_dot[1][-1])
    )
    beta = displacement_beta(spec, wave, (0.0, t_end)).magnitude
    beta_err = abs(alpha - beta) / beta
    rows.append(("driven_beta_error", beta_err, 0.05, beta_err < 0.05))
    return rows


def cmd_lattice_verify(run: RunConfig | None, outputs: _OutputSet) -> int:
    n_values = run.lattice_n_values if run is not None else (19, 39, 79, 159)
    rows = _lattice_checks(n_values)
    with outputs.open("lattice_verify.csv") as fh:
        fh.write("check,measured,bound,status\n")
        for name, measured, bound, ok in rows:
            fh.write(
                f"{name},{_fmt(measured)},{_fmt(bound)},"
                f"{'pass' if ok else 'FAIL'}\n"
            )
    all_ok = True
    for name, measured, bound, ok in rows:
        status = "pass" if ok else "FAIL"
        print(f"{status:>4}  {name:<24} measured = {measured:.3e}  "
              f"bound = {bound:.3e}")
        all_ok = all_ok and ok
    if run is not None:
        _write_metadata(outputs, run, "lattice-verify")
    return 0 if all_ok else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gravibar",
        description="Bar-resonator single-graviton detection toolkit",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, config_required=True):
        p.add_argument(
            "--config", required=config_required,
            help="INI run configuration",
        )
        p.add_argument("--out", help="output directory (overrides config)")
        p.add_argument(
            "--materials", help="extra material table (INI)", default=None
        )

    common(sub.add_parser("rates", help="intrinsic detector rates"))
    common(sub.add_parser("chi", help="drive content by every applicable method"))
    common(sub.add_parser("optimal-mass", help="mass maximizing P(single quantum)"))
    sim = sub.add_parser("simulate", help="stochastic measurement trajectories")
    common(sim)
    sim.add_argument("--seed", type=int, help="override the config seed")
    sim.add_argument("--n-traj", type=int, help="override trajectory count")
    sens = sub.add_parser("sensitivity", help="characteristic strain curve")
    common(sens)
    sens.add_argument(
        "--reference", default=None,
        help="two-column reference table to re-emit alongside the curve",
    )
    lat = sub.add_parser("lattice-verify", help="chain-vs-continuum checks")
    common(lat, config_required=False)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        run = None
        if args.config is not None:
            run = parse_config(args.config, args.materials)
            if getattr(args, "seed", None) is not None:
                run.measurement = dataclasses.replace(
                    run.measurement, seed=args.seed
                )
                run.resolved["measurement"]["seed"] = args.seed
            if getattr(args, "n_traj", None) is not None:
                run.n_traj = args.n_traj
                run.resolved["measurement"]["n_traj"] = args.n_traj
        elif args.command != "lattice-verify":
            raise ConfigError("--config is required")
        out_dir = args.out or (run.out_dir if run is not None else "out")
        outputs = _OutputSet(out_dir)
    except (ConfigError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2

    try:
        if args.command == "rates":
            return cmd_rates(run, outputs)
        if args.command == "chi":
            return cmd_chi(run, outputs)
        if args.command == "optimal-mass":
            return cmd_optimal_mass(run, outputs)
        if args.command == "simulate":
            return cmd_simulate(run, outputs)
        if args.command == "sensitivity":
            return cmd_sensitivity(run, outputs, args.reference)
        if args.command == "lattice-verify":
            return cmd_lattice_verify(run, outputs)
        raise AssertionError(f"unhandled command {args.command}")
    except Exception as exc:  # noqa: BLE001 - single CLI failure boundary
        outputs.discard_all()
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
