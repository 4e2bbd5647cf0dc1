"""Command-line front end.

Subcommands:

* figure2        — plane-wave sweep: QFI, direct-imaging FI, SPADE FI vs s
* figure3        — vortex sweep over the vertical shift psi, with the
                   optimize-over-a envelope on the psi = 0 rows
* convergence    — SPADE FI vs mode cutoff M at fixed ktilde
* adjudicate     — compare every shipped closed form against the
                   general-path oracle and report which variants match
* simulate       — Monte Carlo estimation campaign (JSON report)
* spectral-dump  — normalized spectral mode Phi(omega) table
* optimize-waist — per-separation optimal vortex waist ratio

Configuration is a flat key=value text file; environment variables with the
CARSFISHER_ prefix override the file, and command-line flags override both.
Outputs are deterministic: a fixed config and seed reproduce files
byte-for-byte (sweeps run sequentially in input-grid order).  CSV files are
RFC-4180 records (CRLF, '.' decimals, 17 significant digits) preceded by
'#'-prefixed provenance comments carrying the schema version, tool version,
and the fully resolved configuration.

Exit codes: 0 success, 2 configuration error, 3 numeric non-convergence,
4 closed-form adjudication mismatch.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import math
import os
import sys

import numpy as np

from . import __version__
from .excitation import EmitterScene, PlaneWaveExcitation, VortexExcitation, image_amplitudes
from .fisher import (
    fi_direct,
    fi_spade,
    optimize_waist,
    qfi_plane_closed,
    qfi_separation,
    qfi_vortex_closed,
    spade_collinear_closed,
    vortex_closed_variants,
)
from .montecarlo import BinnedImager, run_experiment, spade_count_model
from .numerics import ConvergenceError
from .psf_modes import GaussianPsf, HermiteGaussBasis, NumericPsf, psf_geometry, psf_value
from .spectral import PulseSpectrum, RamanResonance, normalize_phi

_SCHEMA_VERSION = 1
_CONVERGENCE_M = (5, 10, 15, 20, 25)


class ConfigError(Exception):
    """Invalid configuration input."""


class AdjudicationMismatch(Exception):
    """A shipped closed form failed its oracle comparison."""


@dataclasses.dataclass
class RunConfig:
    """Flat run configuration; every field can come from file, env, or flag."""

    family: str = "plane"
    s_min: float = 0.01
    s_max: float = 3.0
    s_points: int = 120
    ktilde_grid: tuple = (0.0, 1.0, 2.0, 4.0)
    ktilde: float = 2.0
    a: float = math.sqrt(2.0) / 2.0
    a_min: float = 0.05
    a_max: float = 5.0
    psi_grid: tuple = (0.0, 0.1, 0.2, 0.3)
    psi: float = 0.0
    M: int = 10
    output_path: str = ""
    format: str = "csv"
    seed: int = 20260817
    tol: float = 1e-8
    raw: bool = False
    kappa: float = 1.0
    g: float = 1.0
    measurement: str = "spade"
    mu: float = 1e4
    batches: int = 50
    s_sim: float = 1.0
    search_lo: float = 0.5
    search_hi: float = 1.5
    omega_vib: float = 10.0
    gamma_vib: float = 0.5
    weight: float = 1.0
    pump_center: float = 100.0
    pump_bandwidth: float = 1.0
    pump_amplitude: float = 1.0
    stokes_center: float = 90.0
    stokes_bandwidth: float = 1.0
    stokes_amplitude: float = 1.0

    def validate(self):
        if self.family not in ("plane", "vortex"):
            raise ConfigError(f"unknown family {self.family!r}")
        if self.format not in ("csv", "json"):
            raise ConfigError(f"unknown format {self.format!r}")
        if self.measurement not in ("spade", "di"):
            raise ConfigError(f"unknown measurement {self.measurement!r}")
        if self.s_points < 1:
            raise ConfigError("s_points must be at least 1")
        if self.s_min < 0.0 or self.s_max < self.s_min:
            raise ConfigError("need 0 <= s_min <= s_max")
        if not self.ktilde_grid or not self.psi_grid:
            raise ConfigError("parameter grids must be nonempty")
        if self.M < 0:
            raise ConfigError("M must be nonnegative")
        if not 0.0 < self.kappa <= 1.0:
            raise ConfigError("kappa must lie in (0, 1]")
        if not self.g > 0.0:
            raise ConfigError("g must be positive")
        if not 0.0 < self.a_min < self.a_max:
            raise ConfigError("need 0 < a_min < a_max")
        if self.batches < 2:
            raise ConfigError("batches must be at least 2")


def _parse_bool(text: str) -> bool:
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_float_tuple(text: str) -> tuple:
    items = [p for p in (piece.strip() for piece in text.split(",")) if p]
    if not items:
        raise ConfigError("empty grid")
    return tuple(float(p) for p in items)


_FIELD_PARSERS = {
    "family": str, "s_min": float, "s_max": float, "s_points": int,
    "ktilde_grid": _parse_float_tuple, "ktilde": float,
    "a": float, "a_min": float, "a_max": float,
    "psi_grid": _parse_float_tuple, "psi": float,
    "M": int, "output_path": str, "format": str, "seed": int,
    "tol": float, "raw": _parse_bool, "kappa": float, "g": float,
    "measurement": str, "mu": float, "batches": int, "s_sim": float,
    "search_lo": float, "search_hi": float,
    "omega_vib": float, "gamma_vib": float, "weight": float,
    "pump_center": float, "pump_bandwidth": float, "pump_amplitude": float,
    "stokes_center": float, "stokes_bandwidth": float,
    "stokes_amplitude": float,
}


def _apply_setting(cfg: RunConfig, key: str, raw_value: str):
    parser = _FIELD_PARSERS.get(key)
    if parser is None:
        raise ConfigError(f"unknown configuration key {key!r}")
    try:
        setattr(cfg, key, parser(raw_value))
    except (ValueError, TypeError) as exc:
        raise ConfigError(f"invalid value for {key!r}: {raw_value!r}") from exc


def load_config(path: str | None, env=None, overrides=None) -> RunConfig:
    """Build a RunConfig with precedence flags > environment > file.

    The returned config carries explicit_keys, the set of field names that
    were actually supplied (rather than left at their defaults), so
    commands can apply their own defaults to untouched fields.
    """
    cfg = RunConfig()
    explicit: set[str] = set()
    if path:
        try:
            with open(path, "r", encoding="utf-8") as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise ConfigError(f"cannot read config file {path}: {exc}") from exc
        for lineno, line in enumerate(lines, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, _, value = stripped.partition("=")
            _apply_setting(cfg, key.strip(), value.strip())
            explicit.add(key.strip())
    env = os.environ if env is None else env
    for key in _FIELD_PARSERS:
        env_key = "CARSFISHER_" + key.upper()
        if env_key in env:
            _apply_setting(cfg, key, env[env_key])
            explicit.add(key)
    for key, value in (overrides or {}).items():
        if value is not None:
            setattr(cfg, key, value)
            explicit.add(key)
    cfg.validate()
    cfg.explicit_keys = frozenset(explicit)
    return cfg


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _config_comment(cfg: RunConfig) -> str:
    # output_path is deliberately excluded: where a file lives is not part
    # of its content, and identical config + seed must give identical bytes.
    parts = []
    for f in dataclasses.fields(RunConfig):
        if f.name == "output_path":
            continue
        value = getattr(cfg, f.name)
        if isinstance(value, tuple):
            rendered = ",".join(_fmt(v) for v in value)
        else:
            rendered = _fmt(value)
        parts.append(f"{f.name}={rendered}")
    return " ".join(parts)


def _write_csv(path: str, command: str, cfg: RunConfig, header: list[str],
               rows: list[list], extra_comments: tuple[str, ...] = ()):
    lines = [
        f"# carsfisher {__version__} schema={_SCHEMA_VERSION}",
        f"# command={command}",
        f"# config {_config_comment(cfg)}",
    ]
    lines.extend(f"# {comment}" for comment in extra_comments)
    lines.append(",".join(header))
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    _write_text(path, "\r\n".join(lines) + "\r\n")


def _json_default(obj):
    if isinstance(obj, np.bool_):
        return bool(obj)
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    raise TypeError(f"not JSON serializable: {type(obj).__name__}")


def _write_json(path: str, command: str, cfg: RunConfig, payload: dict):
    document = {
        "schema_version": _SCHEMA_VERSION,
        "tool_version": __version__,
        "command": command,
        "config": {f.name: (list(v) if isinstance(v := getattr(cfg, f.name), tuple) else v)
                   for f in dataclasses.fields(RunConfig)
                   if f.name != "output_path"},
    }
    document.update(payload)
    _write_text(path, json.dumps(document, sort_keys=True, indent=2,
                                 default=_json_default) + "\n")


def _write_text(path: str, text: str):
    try:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise ConfigError(f"cannot write output file {path}: {exc}") from exc


def _s_grid(cfg: RunConfig) -> np.ndarray:
    return np.linspace(cfg.s_min, cfg.s_max, cfg.s_points)


def _out_path(cfg: RunConfig, command: str, default_ext: str) -> str:
    return cfg.output_path or f"{command}.{default_ext}"


def _pick(report, cfg: RunConfig) -> float:
    return report.value if cfg.raw else report.normalized_value


def cmd_figure2(cfg: RunConfig) -> str:
    """Plane-wave FI sweep: one row per (ktilde, s)."""
    if cfg.family != "plane":
        raise ConfigError("figure2 requires family=plane")
    psf = GaussianPsf()
    basis = HermiteGaussBasis(truncation_M=max(30, cfg.M))
    rows = []
    for kt in cfg.ktilde_grid:
        exc = PlaneWaveExcitation(ktilde=float(kt))
        for s in _s_grid(cfg):
            s = float(s)
            scene = EmitterScene(s=s, g=cfg.g, kappa=cfg.kappa)
            amps = image_amplitudes(exc, scene, psf)
            geom = psf_geometry(psf, s)
            qfi = qfi_separation(amps, geom)
            di = fi_direct(amps, psf, s, abs_tol=cfg.tol)
            spade = fi_spade(amps, basis, cfg.M, s)
            rows.append([s, float(kt), _pick(qfi, cfg), _pick(di, cfg),
                         _pick(spade, cfg), cfg.M])
    path = _out_path(cfg, "figure2", "csv")
    _write_csv(path, "figure2", cfg,
               ["s", "ktilde", "qfi", "fi_di", "fi_spade_M", "M"], rows,
               extra_comments=("note: the ktilde grid is a tool default; "
                               "override it with the ktilde_grid key",))
    return path


def cmd_figure3(cfg: RunConfig) -> str:
    """Vortex FI sweep over psi, with the waist-optimized envelope at psi=0."""
    if cfg.family != "vortex":
        raise ConfigError("figure3 requires family=vortex")
    psf = GaussianPsf()
    basis = HermiteGaussBasis(truncation_M=max(30, cfg.M))
    s_grid = _s_grid(cfg)
    # waist-optimized envelope, computed on the psi = 0 axis
    raw_scale = 2.0 * cfg.kappa * cfg.g**2
    envelope = {}
    for s, (a_star, q_star) in zip(
            s_grid, optimize_waist(0.0, s_grid, (cfg.a_min, cfg.a_max),
                                   kappa=cfg.kappa, g=cfg.g)):
        envelope[float(s)] = (a_star, q_star if cfg.raw else q_star / raw_scale)
    rows = []
    for psi in cfg.psi_grid:
        exc = VortexExcitation(a=cfg.a, psi=float(psi))
        for s in s_grid:
            s = float(s)
            scene = EmitterScene(s=s, g=cfg.g, kappa=cfg.kappa)
            amps = image_amplitudes(exc, scene, psf)
            geom = psf_geometry(psf, s)
            qfi = qfi_separation(amps, geom)
            di = fi_direct(amps, psf, s, abs_tol=cfg.tol)
            spade = fi_spade(amps, basis, cfg.M, s)
            ratio = di.value / qfi.value if qfi.value > 0.0 else 0.0
            a_opt, q_opt = envelope[s]
            rows.append([s, float(psi), cfg.a, _pick(qfi, cfg),
                         _pick(di, cfg), _pick(spade, cfg), ratio,
                         a_opt, q_opt])
    path = _out_path(cfg, "figure3", "csv")
    _write_csv(path, "figure3", cfg,
               ["s", "psi", "a", "qfi", "fi_di", "fi_spade_M", "di_over_qfi",
                "a_opt", "qfi_opt"], rows,
               extra_comments=("a_opt/qfi_opt: waist-optimized envelope "
                               "computed at psi=0, repeated for each s",))
    return path


def cmd_convergence(cfg: RunConfig) -> str:
    """SPADE FI against mode cutoff M at fixed ktilde."""
    psf = GaussianPsf()
    basis = HermiteGaussBasis(truncation_M=max(30, max(_CONVERGENCE_M)))
    exc = PlaneWaveExcitation(ktilde=cfg.ktilde)
    rows = []
    for s in _s_grid(cfg):
        s = float(s)
        scene = EmitterScene(s=s, g=cfg.g, kappa=cfg.kappa)
        amps = image_amplitudes(exc, scene, psf)
        geom = psf_geometry(psf, s)
        qfi = qfi_separation(amps, geom)
        for m_cut in _CONVERGENCE_M:
            spade = fi_spade(amps, basis, m_cut, s)
            ratio = spade.value / qfi.value if qfi.value > 0.0 else 0.0
            rows.append([s, cfg.ktilde, m_cut, _pick(spade, cfg),
                         _pick(qfi, cfg), ratio])
    path = _out_path(cfg, "convergence", "csv")
    _write_csv(path, "convergence", cfg,
               ["s", "ktilde", "M", "fi_spade", "qfi", "ratio"], rows)
    return path


def _adjudicate_plane(cfg: RunConfig) -> dict:
    psf = GaussianPsf()
    worst = 0.0
    for kt in (0.0, 1.0, 2.0, 4.0):
        exc = PlaneWaveExcitation(ktilde=kt)
        for s in np.linspace(0.01, 3.0, 120):
            s = float(s)
            amps = image_amplitudes(exc, EmitterScene(s=s), psf)
            general = qfi_separation(amps, psf_geometry(psf, s)).normalized_value
            closed = qfi_plane_closed(kt, s).normalized_value
            worst = max(worst, abs(general - closed))
    return {"tolerance": 1e-10, "max_deviation": worst,
            "grid": "ktilde in {0,1,2,4} x 120 s-points in [0.01, 3]",
            "matches": worst < 1e-10}


def _adjudicate_vortex(cfg: RunConfig) -> dict:
    psf = GaussianPsf()
    devs = {"psi_dependent": 0.0, "psi_independent": 0.0}
    for a in (0.5, math.sqrt(2.0) / 2.0, 1.0):
        for psi in (0.0, 0.2):
            exc = VortexExcitation(a=a, psi=psi)
            for s in np.linspace(0.05, 3.0, 60):
                s = float(s)
                amps = image_amplitudes(exc, EmitterScene(s=s), psf)
                general = qfi_separation(amps, psf_geometry(psf, s)).normalized_value
                for name, value in vortex_closed_variants(a, psi, s).items():
                    devs[name] = max(devs[name], abs(general - value))
    matches = {name: dev < 1e-9 for name, dev in devs.items()}
    return {
        "tolerance": 1e-9,
        "grid": "a in {0.5, sqrt(2)/2, 1} x psi in {0, 0.2} x 60 s-points in [0.05, 3]",
        "candidates": {name: {"max_deviation": devs[name], "matches": matches[name]}
                       for name in sorted(devs)},
        "exactly_one_match": sum(matches.values()) == 1,
        "selected": "psi_dependent",
        "selected_matches": matches["psi_dependent"],
    }


def _adjudicate_geometry(cfg: RunConfig) -> dict:
    gaussian = GaussianPsf()

    def evaluator(x, y):
        return psf_value(gaussian, x, y)

    numeric = NumericPsf(evaluator=evaluator)
    worst = {name: 0.0 for name in
             ("delta", "delta_prime", "beta", "eta_plus2", "eta_minus2",
              "xi_plus2", "xi_minus2")}
    for s in (0.3, 1.0, 2.0):
        closed = psf_geometry(gaussian, s)
        quad = psf_geometry(numeric, s)
        for name in worst:
            worst[name] = max(worst[name],
                              abs(getattr(closed, name) - getattr(quad, name)))
    max_dev = max(worst.values())
    return {
        "tolerance": 1e-7,
        "grid": "s in {0.3, 1.0, 2.0}, closed forms vs quadrature geometry",
        "max_deviation_per_scalar": worst,
        "resolved_signs": {
            "beta_at_zero_times_w2": 1.0,
            "delta_prime": "nonpositive for s >= 0",
            "eta_squared": "(dk2 -+ beta)/(4(1 +- delta)) - delta'^2/(4(1 +- delta)^2)",
        },
        "matches": max_dev < 1e-7,
    }


def _adjudicate_spade_closed(cfg: RunConfig) -> dict:
    psf = GaussianPsf()
    basis = HermiteGaussBasis(truncation_M=30)
    exc = PlaneWaveExcitation(ktilde=0.0)
    worst = 0.0
    for s in np.linspace(0.05, 3.0, 60):
        s = float(s)
        amps = image_amplitudes(exc, EmitterScene(s=s), psf)
        series = fi_spade(amps, basis, 30, s).normalized_value
        closed = spade_collinear_closed(s).normalized_value
        worst = max(worst, abs(series - closed))
    return {"tolerance": 1e-8, "max_deviation": worst,
            "grid": "ktilde=0, 60 s-points in [0.05, 3], M=30",
            "matches": worst < 1e-8}


def cmd_adjudicate(cfg: RunConfig) -> tuple[str, bool]:
    """Compare every shipped closed form against the general-path oracle."""
    plane = _adjudicate_plane(cfg)
    vortex = _adjudicate_vortex(cfg)
    geometry = _adjudicate_geometry(cfg)
    spade = _adjudicate_spade_closed(cfg)
    passed = (plane["matches"] and vortex["exactly_one_match"]
              and vortex["selected_matches"] and geometry["matches"]
              and spade["matches"])
    payload = {
        "plane_qfi_closed": plane,
        "vortex_qfi_closed": vortex,
        "mode_geometry": geometry,
        "spade_collinear_closed": spade,
        "all_match": passed,
    }
    path = _out_path(cfg, "adjudication", "json")
    _write_json(path, "adjudicate", cfg, payload)
    return path, passed


def cmd_simulate(cfg: RunConfig) -> str:
    """Monte Carlo campaign: sample counts, estimate s, compare to the CRB."""
    psf = GaussianPsf()
    if cfg.family == "vortex":
        exc = VortexExcitation(a=cfg.a, psi=cfg.psi)
    else:
        exc = PlaneWaveExcitation(ktilde=cfg.ktilde)
    s = cfg.s_sim
    scene = EmitterScene(s=s, g=cfg.g, kappa=cfg.kappa)
    amps = image_amplitudes(exc, scene, psf)
    n_total = amps.n_total
    basis = HermiteGaussBasis(truncation_M=max(30, cfg.M))
    if cfg.measurement == "spade":
        model = spade_count_model(exc, basis, cfg.M, g=cfg.g, kappa=cfg.kappa)
        fisher = fi_spade(amps, basis, cfg.M, s).value
    else:
        imager = BinnedImager(exc, s, g=cfg.g, kappa=cfg.kappa)
        model = imager.expectations
        fisher = imager.fisher_information(s)
    if not fisher > 0.0:
        raise ValueError("Fisher information vanishes: separation not "
                         "identifiable at this configuration")
    report = run_experiment(model, s, cfg.mu, cfg.batches, cfg.seed,
                            (cfg.search_lo, cfg.search_hi), fisher,
                            n_total=n_total, method=cfg.measurement)
    payload = {"report": dataclasses.asdict(report)}
    path = _out_path(cfg, "simulation", "json")
    _write_json(path, "simulate", cfg, payload)
    return path


def cmd_spectral_dump(cfg: RunConfig) -> str:
    """Tabulate the normalized spectral mode Phi(omega)."""
    res = RamanResonance(omega_vib=cfg.omega_vib, gamma_vib=cfg.gamma_vib,
                         polarizability_weight=cfg.weight)
    pump = PulseSpectrum(center=cfg.pump_center, bandwidth=cfg.pump_bandwidth,
                         amplitude=cfg.pump_amplitude)
    stokes = PulseSpectrum(center=cfg.stokes_center,
                           bandwidth=cfg.stokes_bandwidth,
                           amplitude=cfg.stokes_amplitude)
    g, phi = normalize_phi(res, pump, stokes)
    sigma = math.sqrt(2.0 * pump.bandwidth**2 + stokes.bandwidth**2)
    center = 2.0 * pump.center - stokes.center
    grid = np.linspace(center - 12.0 * sigma, center + 12.0 * sigma, 4096)
    values = phi(grid)
    rows = [[float(w), v.real, v.imag, abs(v)] for w, v in zip(grid, values)]
    path = _out_path(cfg, "spectral", "csv")
    _write_csv(path, "spectral-dump", cfg,
               ["omega", "phi_re", "phi_im", "phi_abs"], rows,
               extra_comments=(f"g={g:.17g}",))
    return path


def cmd_optimize_waist(cfg: RunConfig) -> str:
    """Per-separation optimal vortex waist ratio a*(s)."""
    s_grid = _s_grid(cfg)
    results = optimize_waist(cfg.psi, s_grid, (cfg.a_min, cfg.a_max),
                             kappa=cfg.kappa, g=cfg.g)
    raw_scale = 2.0 * cfg.kappa * cfg.g**2
    rows = []
    for s, (a_star, q_star) in zip(s_grid, results):
        value = q_star if cfg.raw else q_star / raw_scale
        rows.append([float(s), cfg.psi, a_star, value])
    path = _out_path(cfg, "waist", "csv")
    _write_csv(path, "optimize-waist", cfg,
               ["s", "psi", "a_opt", "qfi_opt"], rows)
    return path


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="carsfisher",
        description="Fisher-information limits for two-emitter separation "
                    "estimation in coherent Raman imaging")
    parser.add_argument("command",
                        choices=["figure2", "figure3", "convergence",
                                 "adjudicate", "simulate", "spectral-dump",
                                 "optimize-waist"])
    parser.add_argument("--config", default=None, help="key=value config file")
    parser.add_argument("--out", default=None, help="output file path")
    parser.add_argument("--format", default=None, choices=["csv", "json"])
    parser.add_argument("--seed", type=int, default=None)
    parser.add_argument("--modes", type=int, default=None,
                        help="SPADE mode cutoff M")
    parser.add_argument("--tol", type=float, default=None,
                        help="quadrature tolerance override")
    parser.add_argument("--raw", action="store_true", default=None,
                        help="emit raw values instead of w^2 F/(2 kappa g^2)")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    overrides = {
        "output_path": args.out,
        "format": args.format,
        "seed": args.seed,
        "M": args.modes,
        "tol": args.tol,
        "raw": args.raw,
    }
    try:
        cfg = load_config(args.config, overrides=overrides)
        untouched = "family" not in cfg.explicit_keys
        if args.command == "figure2":
            if untouched:
                cfg.family = "plane"
            path = cmd_figure2(cfg)
        elif args.command == "figure3":
            if untouched:
                cfg.family = "vortex"
            path = cmd_figure3(cfg)
        elif args.command == "convergence":
            path = cmd_convergence(cfg)
        elif args.command == "adjudicate":
            path, passed = cmd_adjudicate(cfg)
            print(path)
            return 0 if passed else 4
        elif args.command == "simulate":
            path = cmd_simulate(cfg)
        elif args.command == "spectral-dump":
            path = cmd_spectral_dump(cfg)
        else:
            path = cmd_optimize_waist(cfg)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    except ValueError as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"numeric non-convergence: {exc} (estimate {exc.estimate})",
              file=sys.stderr)
        return 3
    print(path)
    return 0


if __name__ == "__main__":
    sys.exit(main())
