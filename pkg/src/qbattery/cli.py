"""Command-line front end: single runs, sweeps, drive comparisons, self-tests.

Configuration is a single JSON document with all physical fields
dimensionless in omega0 units. CSV artifacts are byte-deterministic: fixed
column order, 17-significant-digit lowercase scientific floats, LF line
endings.
"""

import argparse
import dataclasses
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import analytic, energetics, oracle
from .cd_control import HermitianTrajectorySample, cd_hamiltonian_closed, propagate_unitary
from .dynamics import Trajectory, integrate
from .errors import ConfigError, QBatteryError
from .model import DriveKind, DriveProfile, ModelParams

__all__ = ["OUTPUT_COLUMNS", "RunConfig", "load_config", "main", "selftest_report"]

OUTPUT_COLUMNS = (
    "t",
    "g_tau",
    "a_mean_re",
    "a_mean_im",
    "b_mean_re",
    "b_mean_im",
    "na_re",
    "na_im",
    "nb_re",
    "nb_im",
    "ab_dag_re",
    "ab_dag_im",
    "a_sq_re",
    "a_sq_im",
    "b_sq_re",
    "b_sq_im",
    "ab_re",
    "ab_im",
    "e_b_over_omega0",
    "ergotropy_b_over_omega0",
    "e_a_over_omega0",
    "m_value",
)

SWEEP_PARAMETERS = ("kappa", "gamma", "F0", "omega_env", "g")

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_RUNTIME = 2
EXIT_SELFTEST = 3


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RunConfig:
    params: ModelParams
    profile: DriveProfile
    step: float
    t_end: float
    sample_stride: int
    sweep_parameter: str | None
    sweep_values: tuple
    out_path: str | None
    out_format: str

    def to_dict(self) -> dict:
        d = {
            "model": {
                "omega0": self.params.omega0,
                "g": self.params.g,
                "gamma": self.params.gamma,
                "nbar": self.params.nbar,
                "delta_r": self.params.delta_r,
                "tau": self.params.tau,
            },
            "drive": {
                "profile": self.profile.kind.value,
                "f0": self.profile.f0,
                "omega_env": self.profile.omega_env,
            },
            "numerics": {
                "step": self.step,
                "t_end": self.t_end,
                "sample_stride": self.sample_stride,
            },
            "output": {"path": self.out_path, "format": self.out_format},
        }
        if self.sweep_parameter is not None:
            d["sweep"] = {"parameter": self.sweep_parameter, "values": list(self.sweep_values)}
        return d


def _require_keys(section: dict, allowed: set, name: str) -> None:
    extra = set(section) - allowed
    if extra:
        raise ConfigError(f"unknown keys in '{name}' section: {sorted(extra)}")


def _number(section: dict, key: str, name: str, default=None):
    if key not in section:
        if default is None:
            raise ConfigError(f"missing required key '{key}' in '{name}' section")
        return default
    v = section[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError(f"'{name}.{key}' must be a finite number, got {v!r}")
    return float(v)


def parse_config(doc: dict) -> RunConfig:
    """Validate a configuration document and resolve derived fields."""
    if not isinstance(doc, dict):
        raise ConfigError("configuration must be a JSON object")
    _require_keys(doc, {"model", "drive", "numerics", "sweep", "output"}, "top-level")

    num = doc.get("numerics", {})
    _require_keys(num, {"step", "t_end", "sample_stride"}, "numerics")
    t_end = _number(num, "t_end", "numerics", 20.0)
    if t_end <= 0:
        raise ConfigError(f"numerics.t_end must be > 0, got {t_end}")
    stride = num.get("sample_stride", 10)
    if not isinstance(stride, int) or isinstance(stride, bool) or stride < 1:
        raise ConfigError(f"numerics.sample_stride must be a positive integer, got {stride!r}")

    mdl = doc.get("model", {})
    _require_keys(mdl, {"omega0", "g", "gamma", "nbar", "kT", "delta_r", "kappa", "tau"}, "model")
    try:
        params = ModelParams.build(
            omega0=_number(mdl, "omega0", "model", 1.0),
            g=_number(mdl, "g", "model", 0.0),
            gamma=_number(mdl, "gamma", "model", 0.0),
            tau=_number(mdl, "tau", "model", t_end),
            nbar=_number(mdl, "nbar", "model") if "nbar" in mdl else None,
            kT=_number(mdl, "kT", "model") if "kT" in mdl else None,
            delta_r=_number(mdl, "delta_r", "model") if "delta_r" in mdl else None,
            kappa=_number(mdl, "kappa", "model") if "kappa" in mdl else None,
        )
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    drv = doc.get("drive", {})
    _require_keys(drv, {"profile", "f0", "omega_env"}, "drive")
    kind_name = drv.get("profile", "off")
    try:
        kind = DriveKind(kind_name)
    except ValueError as exc:
        raise ConfigError(
            f"drive.profile must be one of {[k.value for k in DriveKind]}, got {kind_name!r}"
        ) from exc
    profile = DriveProfile(
        kind=kind,
        f0=_number(drv, "f0", "drive", 0.0),
        omega_env=_number(drv, "omega_env", "drive", 0.0),
    )
    if kind is DriveKind.CD_SIN_SQ and params.gamma == 0.0 and params.delta_r == 0.0:
        raise ConfigError("CD-corrected drive requires gamma or delta_r nonzero")

    default_step = min(0.01, 0.5 * 0.05 / max(profile.omega_env, params.g, params.gamma, params.omega0))
    step = _number(num, "step", "numerics", default_step)
    if step <= 0:
        raise ConfigError(f"numerics.step must be > 0, got {step}")

    sweep_parameter = None
    sweep_values: tuple = ()
    if "sweep" in doc:
        swp = doc["sweep"]
        _require_keys(swp, {"parameter", "values"}, "sweep")
        sweep_parameter = swp.get("parameter")
        if sweep_parameter not in SWEEP_PARAMETERS:
            raise ConfigError(f"sweep.parameter must be one of {SWEEP_PARAMETERS}, got {sweep_parameter!r}")
        values = swp.get("values")
        if not isinstance(values, list) or not values:
            raise ConfigError("sweep.values must be a non-empty list")
        for v in values:
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
                raise ConfigError(f"sweep values must be finite numbers, got {v!r}")
        sweep_values = tuple(float(v) for v in values)

    out = doc.get("output", {})
    _require_keys(out, {"path", "format"}, "output")
    out_format = out.get("format", "csv")
    if out_format not in ("csv", "json"):
        raise ConfigError(f"output.format must be 'csv' or 'json', got {out_format!r}")
    out_path = out.get("path")
    if out_path is not None and not isinstance(out_path, str):
        raise ConfigError("output.path must be a string")

    return RunConfig(
        params=params,
        profile=profile,
        step=step,
        t_end=t_end,
        sample_stride=stride,
        sweep_parameter=sweep_parameter,
        sweep_values=sweep_values,
        out_path=out_path,
        out_format=out_format,
    )


def load_config(path: str) -> RunConfig:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    return parse_config(doc)


# ---------------------------------------------------------------------------
# artifacts
# ---------------------------------------------------------------------------

def _fmt(x: float) -> str:
    return format(float(x), ".16e")


def trajectory_rows(traj: Trajectory):
    """OutputRow values per retained sample, in OUTPUT_COLUMNS order."""
    g = traj.params.g
    omega0 = traj.params.omega0
    for t, s in traj:
        rep = energetics.ergotropy_b(s, omega0)
        yield (
            t,
            g * t,
            s.a_mean.real,
            s.a_mean.imag,
            s.b_mean.real,
            s.b_mean.imag,
            s.na,
            0.0,
            s.nb,
            0.0,
            s.ab_dag.real,
            s.ab_dag.imag,
            s.a_sq.real,
            s.a_sq.imag,
            s.b_sq.real,
            s.b_sq.imag,
            s.ab.real,
            s.ab.imag,
            rep.e_b / omega0,
            rep.ergotropy_b / omega0,
            rep.e_a / omega0,
            rep.m_value,
        )


def write_trajectory(path: Path, traj: Trajectory, fmt: str, config_echo: dict) -> int:
    """Write one run artifact; returns the number of data rows."""
    rows = list(trajectory_rows(traj))
    if fmt == "csv":
        lines = [",".join(OUTPUT_COLUMNS)]
        lines += [",".join(_fmt(v) for v in row) for row in rows]
        path.write_text("\n".join(lines) + "\n", encoding="utf-8", newline="\n")
    else:
        doc = {
            "schema": "qbattery-data-v1",
            "config": config_echo,
            "columns": list(OUTPUT_COLUMNS),
            "rows": [[float(_fmt(v)) for v in row] for row in rows],
        }
        _write_json(path, doc)
    return len(rows)


def _write_json(path: Path, doc: dict) -> None:
    path.write_text(
        json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n",
        encoding="utf-8",
        newline="\n",
    )


def _manifest_path(out_path: Path) -> Path:
    return out_path.with_name(out_path.name + ".manifest.json")


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def run_simulate(config: RunConfig) -> Path:
    if config.out_path is None:
        raise ConfigError("simulate requires output.path")
    traj = integrate(
        config.params, config.profile, config.step, config.t_end, config.sample_stride
    )
    out_path = Path(config.out_path)
    echo = config.to_dict()
    n_rows = write_trajectory(out_path, traj, config.out_format, echo)
    manifest = {
        "schema": "qbattery-manifest-v1",
        "command": "simulate",
        "config": echo,
        "columns": list(OUTPUT_COLUMNS),
        "outputs": [{"path": out_path.name, "rows": n_rows, "format": config.out_format}],
    }
    _write_json(_manifest_path(out_path), manifest)
    return out_path


def _apply_sweep_value(config: RunConfig, value: float) -> RunConfig:
    p, d = config.params, config.profile
    name = config.sweep_parameter
    if name == "kappa":
        p = dataclasses.replace(p, delta_r=p.omega0 * (1.0 - value))
    elif name == "gamma":
        p = dataclasses.replace(p, gamma=value)
    elif name == "g":
        p = dataclasses.replace(p, g=value)
    elif name == "F0":
        d = dataclasses.replace(d, f0=value)
    elif name == "omega_env":
        d = dataclasses.replace(d, omega_env=value)
    return dataclasses.replace(
        config, params=p, profile=d, sweep_parameter=None, sweep_values=()
    )


def run_sweep(config: RunConfig) -> tuple[Path, bool]:
    """Run one simulate per sweep value; returns (manifest path, all_ok)."""
    if config.sweep_parameter is None:
        raise ConfigError("sweep requires a 'sweep' section in the config")
    if config.out_path is None:
        raise ConfigError("sweep requires output.path")
    base = Path(config.out_path)
    runs = []
    all_ok = True
    for i, value in enumerate(config.sweep_values):
        point_path = base.with_name(f"{base.stem}_{i:02d}{base.suffix}")
        point_config = dataclasses.replace(
            _apply_sweep_value(config, value), out_path=str(point_path)
        )
        entry = {"value": value, "path": point_path.name, "status": "ok"}
        try:
            run_simulate(point_config)
        except QBatteryError as exc:
            entry["status"] = "error"
            entry["error"] = str(exc)
            all_ok = False
        runs.append(entry)
    manifest = {
        "schema": "qbattery-sweep-v1",
        "command": "sweep",
        "config": config.to_dict(),
        "parameter": config.sweep_parameter,
        "columns": list(OUTPUT_COLUMNS),
        "runs": runs,
    }
    manifest_path = _manifest_path(base)
    _write_json(manifest_path, manifest)
    return manifest_path, all_ok


def compare_drives(config: RunConfig) -> dict:
    """Max ergotropy of the CD drive against its bare-envelope and static partners."""
    if config.profile.kind is not DriveKind.CD_SIN_SQ:
        raise ConfigError("compare requires a cd_sin_sq drive profile")
    partners = {
        "cd": config.profile,
        "bare": DriveProfile.sin_sq(config.profile.f0, config.profile.omega_env),
        "static": DriveProfile.static(config.profile.f0),
    }
    maxima = {}
    argmax = {}
    for name, profile in partners.items():
        traj = integrate(config.params, profile, config.step, config.t_end, config.sample_stride)
        series = np.array(
            [r.ergotropy_b / config.params.omega0 for r in energetics.report_series(traj)]
        )
        k = int(np.argmax(series))
        maxima[name] = float(series[k])
        argmax[name] = float(config.params.g * traj.times[k])

    def ratio(num: float, den: float):
        return num / den if den > 0.0 else None

    return {
        "schema": "qbattery-compare-v1",
        "config": config.to_dict(),
        "max_ergotropy_over_omega0": maxima,
        "argmax_g_tau": argmax,
        "ratios": {
            "cd_over_static": ratio(maxima["cd"], maxima["static"]),
            "cd_over_bare": ratio(maxima["cd"], maxima["bare"]),
        },
    }


# ---------------------------------------------------------------------------
# selftest
# ---------------------------------------------------------------------------

def close_check(name: str, deviation: float, tol: float, **extra) -> dict:
    """Named pass/fail record for a scalar deviation against a tolerance."""
    status = "pass" if deviation <= tol else "fail"
    rec = {"name": name, "status": status, "deviation": deviation, "tolerance": tol}
    rec.update(extra)
    return rec


def _selftest_oracle_check() -> list:
    points = [
        (
            "moments_vs_oracle_cd_drive",
            ModelParams(omega0=1.0, g=0.2, gamma=1.0, nbar=0.2, delta_r=0.0, tau=4.0),
            DriveProfile.cd_sin_sq(0.2, 0.5),
        ),
        (
            "moments_vs_oracle_static_drive",
            ModelParams(omega0=1.0, g=0.3, gamma=0.05, nbar=0.1, delta_r=0.0, tau=4.0),
            DriveProfile.static(0.1),
        ),
    ]
    out = []
    for name, params, profile in points:
        dense = oracle.dense_evolve(
            params, profile, cutoffs=(12, 12), step=0.01, t_end=4.0, sample_stride=100
        )
        traj = integrate(params, profile, 0.004, 4.0, sample_stride=250)
        dev = 0.0
        for i in range(len(dense.times)):
            m_dense = oracle.extract_moments(dense.states[i]).as_array()
            dev = max(dev, float(np.max(np.abs(m_dense - traj.moments[i]))))
        out.append(close_check(name, dev, 1e-6))
    return out


def _selftest_decomposition_check() -> list:
    params = ModelParams(omega0=1.0, g=0.2, gamma=1.0, nbar=0.5, delta_r=0.0, tau=10.0)
    profile = DriveProfile.cd_sin_sq(0.3, 0.5)
    result = energetics.decompose(params, profile, step=0.005, t_end=10.0, sample_stride=10)
    thermal_erg = max(r.ergotropy_b for r in result.thermal)
    return [
        close_check("decomposition_energy_additivity", result.max_energy_residual, 1e-6),
        close_check("decomposition_ergotropy_coherent", result.max_ergotropy_residual, 1e-6),
        close_check("decomposition_thermal_ergotropy_zero", thermal_erg, 1e-9),
    ]


def _selftest_transitionless_check() -> list:
    delta, lam0, t_total, n = 0.5, 8.0, 2.0, 2001
    ts = np.linspace(0.0, t_total, n)
    samples = []
    for t in ts:
        lam = lam0 * math.cos(math.pi * t / t_total)
        h0 = 0.5 * np.array([[lam, delta], [delta, -lam]], dtype=complex)
        samples.append(HermitianTrajectorySample(t=t, matrix=h0))
    cd = cd_hamiltonian_closed(samples)
    ground = []
    for s in samples:
        _, v = np.linalg.eigh(s.matrix)
        ground.append(v[:, 0])

    def min_overlap(h_list):
        psi = propagate_unitary(ts, h_list, ground[0])
        ov = [abs(np.vdot(ground[k], psi[k])) ** 2 for k in range(0, n, 20)]
        return min(ov)

    bare = min_overlap([s.matrix for s in samples])
    driven = min_overlap([s.matrix + c.matrix for s, c in zip(samples, cd)])
    return [
        close_check("transitionless_cd_overlap", 1.0 - driven, 1e-4, overlap=driven),
        close_check(
            "transitionless_bare_drops",
            0.0 if bare < 0.9 else 1.0,
            0.5,
            bare_overlap=bare,
        ),
    ]


def _selftest_analytic_check() -> list:
    params = ModelParams(omega0=1.0, g=0.2, gamma=0.05, nbar=0.0, delta_r=0.0, tau=10.0)
    profile = DriveProfile.cd_sin_sq(0.05, 0.5)
    report = analytic.validate_against_numerics(params, profile, t_end=10.0)
    status = "pass" if report.status == "VERIFIED" else "warn"
    return [
        {
            "name": "analytic_closed_form",
            "status": status,
            "report": report.to_dict(),
        }
    ]


def selftest_report() -> dict:
    """Run the cross-validation suite and return a JSON-ready report."""
    checks = []
    checks += _selftest_oracle_check()
    checks += _selftest_decomposition_check()
    checks += _selftest_transitionless_check()
    checks += _selftest_analytic_check()
    failed = [c["name"] for c in checks if c["status"] == "fail"]
    status = "fail" if failed else "pass"
    return {"schema": "qbattery-selftest-v1", "status": status, "checks": checks}


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------

def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qbattery",
        description="Open quantum battery charging simulator (dimensionless omega0 units).",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (
        ("simulate", "run one trajectory and write the data artifact"),
        ("sweep", "run one trajectory per sweep value plus a manifest"),
        ("compare", "CD drive vs bare envelope vs static drive gain report"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the JSON configuration")
    p = sub.add_parser("selftest", help="run the cross-validation suite")
    p.add_argument("--json", help="write the JSON report to this path")
    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "selftest":
            report = selftest_report()
            for check in report["checks"]:
                print(f"{check['name']}: {check['status'].upper()}")
            if args.json:
                _write_json(Path(args.json), report)
            print(f"selftest: {report['status'].upper()}")
            return EXIT_OK if report["status"] == "pass" else EXIT_SELFTEST

        config = load_config(args.config)
        if args.command == "simulate":
            out = run_simulate(config)
            print(f"wrote {out}")
            return EXIT_OK
        if args.command == "sweep":
            manifest, all_ok = run_sweep(config)
            print(f"wrote {manifest}")
            return EXIT_OK if all_ok else EXIT_RUNTIME
        if args.command == "compare":
            report = compare_drives(config)
            if config.out_path is not None:
                _write_json(Path(config.out_path), report)
                print(f"wrote {config.out_path}")
            else:
                print(json.dumps(report, sort_keys=True, indent=2))
            return EXIT_OK
        raise AssertionError(f"unhandled command {args.command}")
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except QBatteryError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    raise SystemExit(main())
