"""Command-line driver: scenario configs in, trace CSVs and JSON reports out.

Subcommands map one-to-one onto the physics modules (modal, pullin,
transient, cantilever, qswitch, dual, sweep).  All writes are atomic
(temp file + rename) and byte-deterministic: the same config always
produces identical output files, regardless of --jobs.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
import tempfile
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import actuation, cantilever, laser, materials, modal, optics
from .config import SCHEMA_VERSION, ConfigError, Scenario, load_scenario
from .presets import SCENARIO_PRESETS

EXIT_OK = 0
EXIT_SCHEMA = 2
EXIT_PHYSICS = 3


# ---------------------------------------------------------------------------
# Deterministic, atomic report emission
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        return repr(value)
    if isinstance(value, np.integer):
        return str(int(value))
    return str(value)


def write_atomic(path: str, data: bytes) -> None:
    """Write via a sibling temp file and rename; never a partial file."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as fh:
            fh.write(data)
        os.replace(tmp, path)
    except BaseException:
        os.unlink(tmp)
        raise


def emit_csv(path: str, header: list[str], rows: list[list]) -> None:
    lines = [",".join(header)]
    lines.extend(",".join(_fmt(v) for v in row) for row in rows)
    write_atomic(path, ("\n".join(lines) + "\n").encode("utf-8"))


def emit_json(path: str, payload: dict) -> None:
    payload = dict(payload, schema_version=SCHEMA_VERSION)
    write_atomic(path, (json.dumps(payload, sort_keys=True, indent=2) + "\n").encode("utf-8"))


def emit_report(results: dict, fmt: str, path: str) -> None:
    """Emit a flat result mapping as JSON or a two-column CSV."""
    if fmt == "json":
        emit_json(path, results)
    else:
        rows = [[k, _fmt(v)] for k, v in sorted(results.items())]
        emit_csv(path, ["field", "value"], rows)


# ---------------------------------------------------------------------------
# Scenario helpers
# ---------------------------------------------------------------------------

def _material(s: Scenario) -> materials.MaterialProps:
    """Scenario material with the config's release stress folded in."""
    import dataclasses

    if s.residual_stress and s.residual_stress != s.material.builtin_stress:
        return dataclasses.replace(s.material, builtin_stress=s.residual_stress)
    return s.material


def _stress(s: Scenario) -> float:
    """Film stress at the run temperature (falls back to the release value)."""
    mat = _material(s)
    if s.temperature is not None and s.substrate is not None:
        return materials.stress_at_temperature(mat, s.substrate, s.temperature)
    return mat.builtin_stress


def _modal_summary(s: Scenario) -> dict:
    sigma = _stress(s)
    lumped = modal.effective_spring_and_mass(s.device, s.material, sigma,
                                             basis_size=s.basis_size)
    out = {
        "stress_pa": sigma,
        "frequency_hz": lumped["frequency_hz"],
        "spring_n_per_m": lumped["k"],
        "effective_mass_kg": lumped["m_eff"],
    }
    if s.substrate is not None:
        onset = materials.buckling_onset(_material(s), s.substrate,
                                         s.device.length, s.device.thickness)
        out["buckling_onset_k"] = onset["onset_temperature"]
    return out


def _transient(s: Scenario) -> actuation.MembraneTrajectory:
    duration = s.duration if s.duration is not None else s.periods / s.drive.frequency
    return actuation.simulate_transient(s.device, s.material, _stress(s), s.drive,
                                        q_factor=s.q_factor, duration=duration,
                                        basis_size=s.basis_size)


def _trace_rows(trace: laser.PowerTrace) -> list[list]:
    t = np.arange(len(trace.output_power)) * trace.dt
    return [[ti, phi, n, p] for ti, phi, n, p in
            zip(t, trace.photon_number, trace.inversion, trace.output_power)]


def _pulse_report(trace: laser.PowerTrace, cw_reference: float | None) -> dict:
    stats = laser.extract_pulses(trace, cw_reference=cw_reference)
    return {"pulses": stats["pulses"], "train": stats["train"]}


# ---------------------------------------------------------------------------
# Subcommand runners
# ---------------------------------------------------------------------------

def run_modal(s: Scenario, out: str, fmt: str) -> None:
    emit_report(_modal_summary(s), fmt, os.path.join(out, "modal." + fmt))


def run_pullin(s: Scenario, out: str, fmt: str) -> None:
    lumped = modal.effective_spring_and_mass(s.device, s.material, _stress(s),
                                             basis_size=s.basis_size)
    pi = actuation.pull_in_voltage(s.device, lumped["k"])
    emit_report({
        "pull_in_voltage_v": pi["voltage"],
        "pull_in_displacement_m": pi["displacement"],
        "spring_n_per_m": lumped["k"],
        "rest_capacitance_f": actuation.capacitance(s.device, 0.0),
        "frequency_hz": lumped["frequency_hz"],
    }, fmt, os.path.join(out, "pullin." + fmt))


def run_transient(s: Scenario, out: str, fmt: str) -> None:
    traj = _transient(s)
    rows = [[t, x, v, int(c), vi] for t, x, v, c, vi in
            zip(traj.times, traj.displacement, traj.velocity, traj.contact, traj.voltage)]
    emit_csv(os.path.join(out, "trajectory.csv"),
             ["t_s", "x_m", "v_ms", "contact", "volts"], rows)
    metrics = actuation.trajectory_metrics(traj)
    emit_report(metrics, fmt, os.path.join(out, "transient." + fmt))


def run_cantilever(s: Scenario, out: str, fmt: str) -> None:
    cant = s.device
    if s.curl_radius is not None:
        kappa = 1.0 / s.curl_radius
        stress = cantilever.stress_for_radius(cant, s.material, s.curl_radius)
    else:
        kappa = cantilever.curvature_from_stress(cant, s.material)
        stress = cant.stress_layer_stress
    shape = cantilever.profile_and_tip(cant, kappa)
    emit_csv(os.path.join(out, "profile.csv"), ["x_m", "z_m"],
             [[x, z] for x, z in shape["profile"]])
    summary = {
        "curvature_1_per_m": kappa,
        "stress_layer_pa": stress,
        "tip_deflection_m": shape["tip_deflection"],
        "tip_slope_deg": math.degrees(shape["tip_slope"]),
        "beam_deviation_deg": math.degrees(shape["beam_deviation"]),
        "frequency_hz": cantilever.cantilever_frequency(cant, s.material),
    }
    try:
        snap = cantilever.pulldown_voltage(cant, s.material, kappa)
        summary["pulldown_voltage_v"] = snap["voltage"]
    except cantilever.NoSnapDownError as exc:
        summary["pulldown_voltage_v"] = math.nan
        summary["pulldown_flag"] = f"no snap-down below {exc.v_max:.3g} V"
    emit_report(summary, fmt, os.path.join(out, "cantilever." + fmt))


def run_qswitch(s: Scenario, out: str, fmt: str) -> None:
    traj = _transient(s)
    schedule = optics.loss_schedule(traj, s.coupling)
    emit_csv(os.path.join(out, "schedule.csv"), ["t_s", "r_back"],
             [[t, r] for t, r in zip(schedule.times, schedule.back_reflectivity)])
    trace = laser.simulate_qswitch(s.laser, schedule,
                                   dt=min(0.5 * s.laser.round_trip_time, schedule.dt))
    emit_csv(os.path.join(out, "trace.csv"),
             ["t_s", "photons", "inversion", "power_w"], _trace_rows(trace))
    cw = laser.steady_state(s.laser, s.coupling.base_reflectivity)["power_w"]
    report = _pulse_report(laser.settled_half(trace), cw)
    report["cw_power_w"] = cw
    report["drive_frequency_hz"] = s.drive.frequency
    report["repetition_rate"] = report["train"]["repetition_rate"]
    emit_json(os.path.join(out, "qswitch.json"), report)


def run_dual(s: Scenario, out: str, fmt: str) -> None:
    traj = _transient(s)
    result = laser.simulate_dual(s.laser, s.laser_b, traj, s.coupling, s.coupling_b)

    report = {"drive_frequency_hz": s.drive.frequency}
    for arm, trace, params, coupling in (
        ("a", result["trace_a"], s.laser, s.coupling),
        ("b", result["trace_b"], s.laser_b, s.coupling_b),
    ):
        emit_csv(os.path.join(out, f"trace_{arm}.csv"),
                 ["t_s", "photons", "inversion", "power_w"], _trace_rows(trace))
        cw = laser.steady_state(params, coupling.base_reflectivity)["power_w"]
        report[f"arm_{arm}"] = _pulse_report(laser.settled_half(trace), cw)
    report["peak_time_offset_s"] = result["peak_time_offset"]
    report["offset_fraction_of_period"] = result["peak_time_offset"] * s.drive.frequency
    emit_json(os.path.join(out, "dual.json"), report)


def run_sweep(s: Scenario, out: str, fmt: str, jobs: int) -> None:
    axis = s.sweep["axis"]
    values = s.sweep["values"]

    def one(value: float) -> list:
        sv = _scenario_at(s, axis, value)
        try:
            summary = _modal_summary(sv)
            return [axis, value, summary["frequency_hz"], "ok"]
        except materials.BucklingError:
            return [axis, value, math.nan, "buckled"]

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(one, values))
    else:
        rows = [one(v) for v in values]
    emit_csv(os.path.join(out, "sweep.csv"),
             ["axis", "value_si", "frequency_hz", "flag"], rows)


def _scenario_at(s: Scenario, axis: str, value: float) -> Scenario:
    import copy

    sv = copy.copy(s)
    if axis == "device.length":
        sv.device = modal.BridgeGeometry(
            length=value, width=s.device.width, thickness=s.device.thickness,
            gap=s.device.gap, dielectric_thickness=s.device.dielectric_thickness,
            dielectric_rel_permittivity=s.device.dielectric_rel_permittivity)
    elif axis == "run.temperature":
        sv.temperature = value
    else:  # pragma: no cover - rejected at parse time
        raise ConfigError("sweep.axis", f"unsupported axis {axis!r}")
    return sv


def _with_kind(s: Scenario, kind: str) -> Scenario:
    import copy

    sv = copy.copy(s)
    sv.kind = kind
    if kind == "sweep" and sv.sweep is None:
        raise ConfigError("sweep", "required for kind='sweep': a [sweep] table")
    return sv


RUNNERS = {
    "modal": run_modal,
    "pullin": run_pullin,
    "transient": run_transient,
    "cantilever": run_cantilever,
    "qswitch": run_qswitch,
    "dual": run_dual,
}


# ---------------------------------------------------------------------------
# Entry point
# ---------------------------------------------------------------------------

def seed_presets(out: str) -> list[str]:
    """Write the shipped scenario files into ``out``; returns the paths."""
    paths = []
    for name, text in sorted(SCENARIO_PRESETS.items()):
        path = os.path.join(out, name + ".toml")
        write_atomic(path, text.encode("utf-8"))
        paths.append(path)
    return paths


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="moems-qswitch",
        description="Micro-mirror Q-switched fiber laser simulation toolkit")
    parser.add_argument("--seed-presets", action="store_true",
                        help="write the shipped scenario presets to --out and exit")
    parser.add_argument("--out", default="out", help="output directory")
    sub = parser.add_subparsers(dest="command")
    for name in (*RUNNERS, "sweep"):
        p = sub.add_parser(name, help=f"run the {name} pipeline stage")
        p.add_argument("--config", required=True, help="scenario TOML file")
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--format", choices=("csv", "json"), default="json",
                       help="summary report format")
        p.add_argument("--jobs", type=int, default=1, help="sweep worker count")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.seed_presets:
        for path in seed_presets(args.out):
            print(path)
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_SCHEMA

    try:
        scenario = load_scenario(args.config)
    except (ConfigError, OSError) as exc:
        print(json.dumps({"error": "config", "detail": str(exc)}), file=sys.stderr)
        return EXIT_SCHEMA

    # A config may be run by any subcommand whose prerequisites it satisfies
    # (e.g. `modal` on a qswitch config); re-validate against the subcommand.
    from .config import _check_kind_requirements

    try:
        revalidated = scenario if args.command == scenario.kind else _with_kind(scenario, args.command)
        _check_kind_requirements(revalidated)
        scenario = revalidated
    except ConfigError as exc:
        print(json.dumps({"error": "config", "detail": str(exc)}), file=sys.stderr)
        return EXIT_SCHEMA

    try:
        if args.command == "sweep":
            run_sweep(scenario, args.out, args.format, args.jobs)
        else:
            RUNNERS[args.command](scenario, args.out, args.format)
    except (materials.BucklingError, laser.NoPulsesError, laser.LaserInstabilityError,
            cantilever.OverCurledError, actuation.NoActuationEventError) as exc:
        print(json.dumps({"error": "physics", "type": type(exc).__name__,
                          "detail": str(exc)}), file=sys.stderr)
        return EXIT_PHYSICS
    return EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
