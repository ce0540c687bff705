"""Command-line front end: evolve, sweep, calibrate, field-stats, gate-report, profile.

Science parameters come from JSON config files (schema-validated, unknown
keys rejected); flags handle only I/O and execution concerns.  Outputs are
deterministic for a fixed config, with floats written at 17 significant
digits.  Exit codes: 0 ok, 2 config error, 3 integrator convergence
failure, 4 calibration not found.
"""

from __future__ import annotations

import argparse
import json
import sys
from importlib import resources
from pathlib import Path

import jsonschema
import numpy as np

from .analytic import analytic_trajectory
from .core import (
    CalibrationError,
    CavityParams,
    ConvergenceError,
    AmplitudeVector,
    basis_labels,
)
from .coupling import CouplingTrace, GenericProfile, GenericProfileParams, scaled_pair
from .fieldgrid import (
    FieldGrid,
    PathSpec,
    coupling_trace_from_field,
    grid_from_json,
    mode_volume,
    peak_energy_point,
    polarization_fraction,
    synthesize_mode,
)
from .gates import GateSettings, TARGETS, calibrate_velocity, truth_table
from .ode import Trajectory, build_subspace, drive_from_profile, evolve, trajectory_to_csv
from .sweep import surface, surfaces_to_csv
from . import svg as svgmod

__all__ = ["main", "example_config_path"]

_NUM_POS = {"type": "number", "exclusiveMinimum": 0}
_NUM = {"type": "number"}
_VEC3 = {"type": "array", "items": _NUM, "minItems": 3, "maxItems": 3}

_PROFILE_SCHEMA = {
    "type": "object",
    "properties": {
        "omega0": _NUM_POS,
        "path_half_length": _NUM_POS,
        "defect_radius": _NUM_POS,
        "lattice_const": _NUM_POS,
        "velocity": _NUM_POS,
        "zeta": _NUM,
    },
    "required": ["omega0", "path_half_length", "defect_radius", "lattice_const", "velocity"],
    "additionalProperties": False,
}

_FAMILY_SCHEMA = {
    "type": "object",
    "properties": {k: v for k, v in _PROFILE_SCHEMA["properties"].items() if k != "velocity"},
    "required": ["omega0", "path_half_length", "defect_radius", "lattice_const"],
    "additionalProperties": False,
}

_FIELD_SCHEMA = {
    "type": "object",
    "oneOf": [
        {
            "properties": {
                "source": {"const": "synthesize"},
                "kind": {"enum": ["cavity2d", "cavity3d"]},
                "lattice_const": _NUM_POS,
                "decay_radius": _NUM_POS,
                "dims": {
                    "type": "array",
                    "items": {"type": "integer", "minimum": 1},
                    "minItems": 3,
                    "maxItems": 3,
                },
                "spacing": {"type": "array", "items": _NUM_POS, "minItems": 3, "maxItems": 3},
            },
            "required": ["source", "kind", "lattice_const", "decay_radius", "dims", "spacing"],
            "additionalProperties": False,
        },
        {
            "properties": {"source": {"const": "file"}, "path": {"type": "string"}},
            "required": ["source", "path"],
            "additionalProperties": False,
        },
    ],
}

_PATH_SCHEMA = {
    "type": "object",
    "properties": {
        "entry": _VEC3,
        "direction": _VEC3,
        "length": _NUM_POS,
        "velocity": _NUM_POS,
        "zeta": _NUM,
    },
    "required": ["entry", "direction", "length", "velocity"],
    "additionalProperties": False,
}

_ODE_SCHEMA = {
    "type": "object",
    "properties": {"rtol": _NUM_POS, "atol": _NUM_POS},
    "additionalProperties": False,
}

_SCENARIO = {"enum": ["generic", "field2d", "field3d"]}
_TARGET = {"enum": sorted(TARGETS)}

SCHEMAS = {
    "evolve": {
        "type": "object",
        "properties": {
            "description": {"type": "string"},
            "scenario": _SCENARIO,
            "profile": _PROFILE_SCHEMA,
            "field": _FIELD_SCHEMA,
            "path": _PATH_SCHEMA,
            "g0": _NUM_POS,
            "dipole_moment": _NUM_POS,
            "omega_cav": _NUM_POS,
            "effective_height": _NUM_POS,
            "p": _NUM,
            "initial": {"enum": ["100", "010", "001"]},
            "engine": {"enum": ["analytic", "ode", "both"]},
            "ode": _ODE_SCHEMA,
            "n_points": {"type": "integer", "minimum": 2},
            "n_samples": {"type": "integer", "minimum": 2},
            "use_magnitude": {"type": "boolean"},
            "svg": {"type": "boolean"},
        },
        "required": ["scenario", "p", "initial"],
        "additionalProperties": False,
    },
    "profile": {
        "type": "object",
        "properties": {
            "description": {"type": "string"},
            "scenario": _SCENARIO,
            "profile": _PROFILE_SCHEMA,
            "field": _FIELD_SCHEMA,
            "path": _PATH_SCHEMA,
            "g0": _NUM_POS,
            "dipole_moment": _NUM_POS,
            "omega_cav": _NUM_POS,
            "effective_height": _NUM_POS,
            "p": _NUM,
            "n_samples": {"type": "integer", "minimum": 2},
            "svg": {"type": "boolean"},
        },
        "required": ["scenario", "p"],
        "additionalProperties": False,
    },
    "calibrate": {
        "type": "object",
        "properties": {
            "description": {"type": "string"},
            "scenario": _SCENARIO,
            "profile": _PROFILE_SCHEMA,
            "field": _FIELD_SCHEMA,
            "path": _PATH_SCHEMA,
            "g0": _NUM_POS,
            "dipole_moment": _NUM_POS,
            "omega_cav": _NUM_POS,
            "effective_height": _NUM_POS,
            "p": _NUM,
            "target": _TARGET,
            "v_bounds": {"type": "array", "items": _NUM_POS, "minItems": 2, "maxItems": 2},
        },
        "required": ["scenario", "p", "target"],
        "additionalProperties": False,
    },
    "gate-report": {
        "type": "object",
        "properties": {
            "description": {"type": "string"},
            "scenario": _SCENARIO,
            "profile": _PROFILE_SCHEMA,
            "field": _FIELD_SCHEMA,
            "path": _PATH_SCHEMA,
            "g0": _NUM_POS,
            "dipole_moment": _NUM_POS,
            "omega_cav": _NUM_POS,
            "effective_height": _NUM_POS,
            "p": _NUM,
            "target": _TARGET,
            "v_bounds": {"type": "array", "items": _NUM_POS, "minItems": 2, "maxItems": 2},
            "velocity": _NUM_POS,
            "q_factor": _NUM_POS,
            "engine": {"enum": ["analytic", "ode"]},
            "ode": _ODE_SCHEMA,
            "use_magnitude": {"type": "boolean"},
        },
        "required": ["scenario", "p", "target", "omega_cav"],
        "additionalProperties": False,
    },
    "field-stats": {
        "type": "object",
        "properties": {
            "description": {"type": "string"},
            "field": _FIELD_SCHEMA,
            "plane_index": {"type": "integer", "minimum": 0},
            "dipole_moment": _NUM_POS,
            "omega_cav": _NUM_POS,
            "effective_height": _NUM_POS,
        },
        "required": ["field"],
        "additionalProperties": False,
    },
    "sweep": {
        "type": "object",
        "properties": {
            "description": {"type": "string"},
            "family": _FAMILY_SCHEMA,
            "v_range": {"type": "array", "items": _NUM_POS, "minItems": 2, "maxItems": 2},
            "p_range": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2},
            "resolution": {
                "type": "array",
                "items": {"type": "integer", "minimum": 2},
                "minItems": 2,
                "maxItems": 2,
            },
            "initial": {"enum": ["100", "010"]},
            "svg": {"type": "boolean"},
        },
        "required": ["family"],
        "additionalProperties": False,
    },
}


class ConfigError(ValueError):
    pass


def example_config_path(name: str) -> Path:
    """Path to a bundled example config (name without the .json suffix)."""
    ref = resources.files("pcqed") / "configs" / f"{name}.json"
    with resources.as_file(ref) as path:
        return Path(path)


def _load_config(path: str, command: str) -> dict:
    try:
        raw = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        config = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    try:
        jsonschema.validate(config, SCHEMAS[command])
    except jsonschema.ValidationError as exc:
        location = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"config {path} invalid at {location}: {exc.message}") from exc
    return config


def _build_grid(config: dict) -> FieldGrid:
    block = config["field"]
    if block["source"] == "synthesize":
        return synthesize_mode(
            block["kind"],
            block["lattice_const"],
            block["decay_radius"],
            tuple(block["dims"]),
            tuple(block["spacing"]),
        )
    return grid_from_json(block["path"])


def _build_field_scenario(config: dict):
    """Grid, path, cavity parameters, and the sampled coupling trace."""
    if "field" not in config or "path" not in config:
        raise ConfigError("field scenarios need both 'field' and 'path' sections")
    grid = _build_grid(config)
    p = config["path"]
    path = PathSpec(
        entry=tuple(p["entry"]),
        direction=tuple(p["direction"]),
        length=p["length"],
        velocity=p["velocity"],
        zeta=p.get("zeta", 0.0),
    )
    omega_cav = config.get("omega_cav")
    if omega_cav is None:
        raise ConfigError("field scenarios need 'omega_cav'")
    _, eps_m = peak_energy_point(grid)
    v_mode = mode_volume(grid, config.get("effective_height"))
    if "g0" in config:
        cavity = CavityParams(omega_cav=omega_cav, eps_m=eps_m, mode_volume=v_mode, g0=config["g0"])
    elif "dipole_moment" in config:
        cavity = CavityParams.from_dipole(config["dipole_moment"], omega_cav, eps_m, v_mode)
    else:
        raise ConfigError("field scenarios need 'g0' or 'dipole_moment'")
    trace = coupling_trace_from_field(grid, path, cavity, config.get("n_samples", 2001))
    return grid, path, cavity, trace


def _profile_from_config(config: dict):
    """Atom A's coupling profile for the configured scenario."""
    scenario = config["scenario"]
    if scenario == "generic":
        if "profile" not in config:
            raise ConfigError("generic scenarios need a 'profile' section")
        block = config["profile"]
        params = GenericProfileParams(
            omega0=block["omega0"],
            path_half_length=block["path_half_length"],
            defect_radius=block["defect_radius"],
            lattice_const=block["lattice_const"],
            velocity=block["velocity"],
            zeta=block.get("zeta", 0.0),
        )
        return GenericProfile(params)
    _, _, _, trace = _build_field_scenario(config)
    return trace


def _stem(args) -> str:
    return Path(args.config).stem


def _out_dir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_trajectory(traj: Trajectory, path: Path, fmt: str) -> Path:
    if fmt == "json":
        doc = {
            "basis": list(traj.basis_labels),
            "times_s": traj.times.tolist(),
            "probabilities": {
                lbl: (np.abs(traj.amplitudes[:, i]) ** 2).tolist()
                for i, lbl in enumerate(traj.basis_labels)
            },
            "amplitudes_re": traj.amplitudes.real.tolist(),
            "amplitudes_im": traj.amplitudes.imag.tolist(),
        }
        path = path.with_suffix(".json")
        path.write_text(json.dumps(doc))
        return path
    return trajectory_to_csv(traj, path)


def _cmd_evolve(args) -> int:
    config = _load_config(args.config, "evolve")
    engine = args.engine or config.get("engine", "both")
    profile_a = _profile_from_config(config)
    p = config["p"]
    initial = config["initial"]
    use_magnitude = config.get("use_magnitude")
    ode_opts = config.get("ode", {})
    rtol = ode_opts.get("rtol", 1e-9)
    atol = ode_opts.get("atol", 1e-11)
    n_points = config.get("n_points", 2000)
    t0, t1 = profile_a.window
    times = np.linspace(t0, t1, n_points)
    out = _out_dir(args)
    stem = _stem(args)
    written: list[Path] = []

    drive_a = drive_from_profile(profile_a, use_magnitude)
    if engine in ("analytic", "both"):
        amps = analytic_trajectory(drive_a, p, times, initial=initial)
        traj = Trajectory(1, basis_labels(1), times, amps, {"engine": "analytic"})
        written.append(_write_trajectory(traj, out / f"{stem}_analytic.csv", args.format))
    if engine in ("ode", "both"):
        drive_b = drive_from_profile(scaled_pair(profile_a, p), use_magnitude)
        traj = evolve(
            build_subspace(1),
            drive_a,
            drive_b,
            AmplitudeVector.basis_state(initial),
            t0,
            t1,
            rtol=rtol,
            atol=atol,
            n_points=n_points,
        )
        written.append(_write_trajectory(traj, out / f"{stem}_ode.csv", args.format))
        if config.get("svg"):
            probs = {
                f"|{lbl}>": np.abs(traj.amplitudes[:, i]) ** 2
                for i, lbl in enumerate(traj.basis_labels)
            }
            written.append(
                svgmod.line_plot_svg(
                    out / f"{stem}.svg",
                    traj.times,
                    probs,
                    title=config.get("description", stem),
                    xlabel="time (s)",
                    ylabel="probability",
                )
            )
    elif config.get("svg") and engine == "analytic":
        probs = {f"|{lbl}>": np.abs(amps[:, i]) ** 2 for i, lbl in enumerate(basis_labels(1))}
        written.append(
            svgmod.line_plot_svg(
                out / f"{stem}.svg",
                times,
                probs,
                title=config.get("description", stem),
                xlabel="time (s)",
                ylabel="probability",
            )
        )
    for path in written:
        print(path)
    return 0


def _cmd_profile(args) -> int:
    config = _load_config(args.config, "profile")
    profile_a = _profile_from_config(config)
    p = config["p"]
    n_samples = config.get("n_samples", 2000)
    t0, t1 = profile_a.window
    times = np.linspace(t0, t1, n_samples)
    va = np.asarray(profile_a(times))
    vb = np.asarray(scaled_pair(profile_a, p)(times))
    out = _out_dir(args)
    path = out / f"{_stem(args)}_profile.csv"
    is_complex = np.iscomplexobj(va) or np.iscomplexobj(vb)
    with path.open("w", newline="") as fh:
        if is_complex:
            fh.write(
                "time_s,coupling_a_re_rad_per_s,coupling_a_im_rad_per_s,"
                "coupling_b_re_rad_per_s,coupling_b_im_rad_per_s\n"
            )
            for t, a, b in zip(times, va.astype(complex), vb.astype(complex)):
                fh.write(
                    f"{t:.17g},{a.real:.17g},{a.imag:.17g},{b.real:.17g},{b.imag:.17g}\n"
                )
        else:
            fh.write("time_s,coupling_a_rad_per_s,coupling_b_rad_per_s\n")
            for t, a, b in zip(times, va, vb):
                fh.write(f"{t:.17g},{a:.17g},{b:.17g}\n")
    print(path)
    if config.get("svg"):
        series = (
            {"|g_A|": np.abs(va), "|g_B|": np.abs(vb)}
            if is_complex
            else {"g_A": va, "g_B": vb}
        )
        svg_path = svgmod.line_plot_svg(
            out / f"{_stem(args)}_profile.svg",
            times,
            series,
            title=config.get("description", "coupling profiles"),
            xlabel="time (s)",
            ylabel="coupling (rad/s)",
        )
        print(svg_path)
    return 0


def _family_for_calibration(config: dict):
    if config["scenario"] == "generic":
        if "profile" not in config:
            raise ConfigError("generic scenarios need a 'profile' section")
        block = config["profile"]
        return GenericProfileParams(
            omega0=block["omega0"],
            path_half_length=block["path_half_length"],
            defect_radius=block["defect_radius"],
            lattice_const=block["lattice_const"],
            velocity=block["velocity"],
            zeta=block.get("zeta", 0.0),
        )
    _, _, _, trace = _build_field_scenario(config)
    return trace


def _cmd_calibrate(args) -> int:
    config = _load_config(args.config, "calibrate")
    family = _family_for_calibration(config)
    v_bounds = tuple(config.get("v_bounds", (150.0, 650.0)))
    v_star = calibrate_velocity(family, config["p"], config["target"], v_bounds)
    doc = {
        "target": config["target"],
        "p": config["p"],
        "velocity_m_per_s": v_star,
        "v_bounds_m_per_s": list(v_bounds),
        "scenario": config["scenario"],
    }
    out = _out_dir(args)
    path = out / f"{_stem(args)}_calibration.json"
    path.write_text(json.dumps(doc, indent=2))
    print(f"calibrated velocity: {v_star:.6g} m/s (target {config['target']})")
    print(path)
    return 0


def _cmd_gate_report(args) -> int:
    config = _load_config(args.config, "gate-report")
    target = TARGETS[config["target"]]
    p = config["p"]
    family = _family_for_calibration(config)
    if "velocity" in config:
        v_star = config["velocity"]
    else:
        v_bounds = tuple(config.get("v_bounds", (150.0, 650.0)))
        v_star = calibrate_velocity(family, p, target, v_bounds)
    if isinstance(family, GenericProfileParams):
        profile_a = GenericProfile(family.replace_velocity(v_star))
    else:
        scale = family.velocity / v_star
        profile_a = CouplingTrace(family.times * scale, family.values, velocity=v_star)
    ode_opts = config.get("ode", {})
    settings = GateSettings(
        target=target,
        profile_a=profile_a,
        p=p,
        velocity=v_star,
        omega_cav=config["omega_cav"],
        q_factor=config.get("q_factor", 1e8),
        use_magnitude=config.get("use_magnitude"),
        rtol=ode_opts.get("rtol", 1e-9),
        atol=ode_opts.get("atol", 1e-11),
    )
    report = truth_table(settings, config.get("engine", "ode"))
    print(report.table())
    out = _out_dir(args)
    path = out / f"{_stem(args)}_report.json"
    path.write_text(report.to_json(indent=2))
    print(path)
    return 0


def _cmd_field_stats(args) -> int:
    config = _load_config(args.config, "field-stats")
    grid = _build_grid(config)
    r_m, eps_m = peak_energy_point(grid)
    v_mode = mode_volume(grid, config.get("effective_height"))
    if grid.components == 3:
        plane = config.get("plane_index", grid.dims[2] // 2)
        pol = polarization_fraction(grid, plane)
    else:
        # Scalar grids model a pure-TM mode; the full energy is in E_z.
        pol = 1.0
    g0 = None
    if "dipole_moment" in config and "omega_cav" in config:
        from .core import g0_from_params

        g0 = g0_from_params(config["dipole_moment"], config["omega_cav"], eps_m, v_mode)
    doc = {
        "v_mode_m3": v_mode,
        "r_m": r_m.tolist(),
        "eps_m": eps_m,
        "g0_rad_s": g0,
        "polarization_fraction": pol,
    }
    out = _out_dir(args)
    path = out / f"{_stem(args)}_stats.json"
    path.write_text(json.dumps(doc, indent=2))
    print(json.dumps(doc, indent=2))
    print(path)
    return 0


def _cmd_sweep(args) -> int:
    config = _load_config(args.config, "sweep")
    fam = config["family"]
    family = GenericProfileParams(
        omega0=fam["omega0"],
        path_half_length=fam["path_half_length"],
        defect_radius=fam["defect_radius"],
        lattice_const=fam["lattice_const"],
        velocity=1.0,  # placeholder; the sweep sets each grid velocity
        zeta=fam.get("zeta", 0.0),
    )
    grid = surface(
        family,
        v_range=tuple(config.get("v_range", (150.0, 650.0))),
        p_range=tuple(config.get("p_range", (0.0, 1.0))),
        initial=config.get("initial", "100"),
        resolution=tuple(config.get("resolution", (251, 201))),
        workers=max(1, args.parallel),
    )
    out = _out_dir(args)
    paths = surfaces_to_csv(grid, out, _stem(args))
    for path in paths:
        print(path)
    if config.get("svg"):
        for name, surf in (("a", grid.a_surface), ("b", grid.b_surface)):
            path = svgmod.heatmap_svg(
                out / f"{_stem(args)}_{name}.svg",
                grid.v_values,
                grid.p_values,
                surf,
                title=f"{name}(V, p), initial |{grid.initial}>",
                xlabel="velocity (m/s)",
                ylabel="coupling ratio p",
            )
            print(path)
    return 0


_COMMANDS = {
    "evolve": _cmd_evolve,
    "sweep": _cmd_sweep,
    "calibrate": _cmd_calibrate,
    "field-stats": _cmd_field_stats,
    "gate-report": _cmd_gate_report,
    "profile": _cmd_profile,
}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", required=True, help="JSON config file")
    parser.add_argument("--out", default=".", help="output directory (default: .)")
    parser.add_argument(
        "--format", choices=["csv", "json"], default="csv", help="trajectory output format"
    )
    parser.add_argument(
        "--parallel", type=int, default=1, metavar="N", help="worker cap for sweeps"
    )
    parser.add_argument("--seed", type=int, default=None, help="reserved")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcqed",
        description="Two flying atoms crossing a single-mode cavity: dynamics, "
        "gate calibration, sweeps, and mode-field analysis.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in _COMMANDS:
        p = sub.add_parser(name)
        _add_common(p)
        if name == "evolve":
            p.add_argument(
                "--engine",
                choices=["analytic", "ode", "both"],
                default=None,
                help="override the config's engine",
            )
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (ConfigError, jsonschema.ValidationError, ValueError, TypeError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except ConvergenceError as exc:
        print(f"convergence failure: {exc}", file=sys.stderr)
        return 3
    except CalibrationError as exc:
        print(f"calibration not found: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
