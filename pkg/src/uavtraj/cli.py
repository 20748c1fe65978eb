"""Command-line interface: plan scenarios, verify them against the
direct-method oracle, batch-run scenario directories, print the config
schema.

Outputs are deterministic: the same scenario always produces byte-identical
CSV and summary files (floats are written with repr, JSON keys are sorted,
no timestamps).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Optional

import numpy as np

from . import kernels
from .aoa import aoa_optimize, count_crossings
from .closed_form import action_closed_form, plan_single_phase
from .core import BoundaryConditions, Vec2
from .errors import (
    ParseError,
    PlannerError,
    UavTrajError,
    ValidationError,
    VerificationFailure,
)
from .mpc import MpcParams, mpc_plan
from .oracle import DiscreteTrajectory, discrete_action
from .potential import QuadraticPhase, intensity_at, interface_value, interface_values
from .scenario import SCHEMA_REFERENCE, Scenario, parse_scenario

CSV_HEADER = ["t", "x", "y", "vx", "vy", "u", "H", "region"]

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_VALIDATION = 3
EXIT_PLANNER = 4
EXIT_VERIFY = 5


def _fmt(x: float) -> str:
    return repr(float(x))


def _write_csv(path: Path, rows) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow([_fmt(v) for v in row[:7]] + [str(int(row[7]))])


def _write_summary(path: Path, summary: dict) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")


def _phase_samples(phase: QuadraticPhase, traj, times: np.ndarray, region: int):
    pos = traj.positions(times)
    vel = traj.velocities(times)
    u = intensity_at(phase, pos)
    h = 0.5 * phase.k * np.einsum("ij,ij->i", vel, vel) + u
    regions = np.full(len(times), region)
    return np.column_stack([times, pos, vel, u, h, regions])


def run_scenario(s: Scenario, out_dir: Path, samples: Optional[int] = None) -> dict:
    """Plan a scenario and write its trajectory CSV and summary document.
    Returns the summary."""
    n_samples = samples if samples is not None else s.output.samples
    times = np.linspace(s.boundary.t0, s.boundary.T, n_samples)
    summary: dict = {"name": s.name, "planner": s.planner, "k": s.k}

    if s.planner == "closed_form":
        phase = s.single_phase()
        traj = plan_single_phase(phase, s.boundary)
        breakdown = action_closed_form(phase, s.boundary)
        rows = _phase_samples(phase, traj, times, region=1)
        summary.update(
            {
                "action": breakdown.action,
                "kinetic_integral": breakdown.kinetic_integral,
                "potential_integral": breakdown.potential_integral,
                "terminal_constant": breakdown.terminal_constant,
                "regime": traj.regime,
                "legs": [
                    {"t0": s.boundary.t0, "T": s.boundary.T, "action": breakdown.action}
                ],
            }
        )
    elif s.planner == "mpc":
        traffic_map = s.biphase_map()
        trace = mpc_plan(traffic_map, s.boundary, s.mpc_params)
        pos = np.column_stack(
            [np.interp(times, trace.times, trace.positions[:, i]) for i in range(2)]
        )
        vel = np.column_stack(
            [np.interp(times, trace.times, trace.velocities[:, i]) for i in range(2)]
        )
        idx = np.clip(np.searchsorted(trace.times, times, side="right") - 1, 0, len(trace.times) - 1)
        regions = trace.region_ids[idx]
        u = np.empty(len(times))
        h = np.empty(len(times))
        for region in (1, 2):
            mask = regions == region
            if np.any(mask):
                phase = traffic_map.phase_of_region(region)
                u[mask] = intensity_at(phase, pos[mask])
                h[mask] = 0.5 * s.k * np.einsum("ij,ij->i", vel[mask], vel[mask]) + u[mask]
        rows = np.column_stack([times, pos, vel, u, h, regions])
        values = interface_values(traffic_map.interface, trace.positions)
        summary.update(
            {
                "action": trace.action_estimate,
                "steps": len(trace.times),
                "dt": s.mpc_params.dt,
                "interface_crossings": count_crossings(values, traffic_map.interface.level),
                "legs": [],
            }
        )
    else:
        traffic_map = s.biphase_map()
        init = mpc_plan(traffic_map, s.boundary, s.mpc_params)
        result = aoa_optimize(traffic_map, s.boundary, init, s.aoa_params)
        tau = result.crossing.tau
        before = times <= tau
        rows_parts = []
        for leg, mask in ((result.leg1, before), (result.leg2, ~before)):
            if np.any(mask):
                region = 1 if leg.phase == traffic_map.phase1 else 2
                rows_parts.append(_phase_samples(leg.phase, leg, times[mask], region))
        rows = np.vstack(rows_parts)
        summary.update(
            {
                "action": result.total_cost,
                "legs": [
                    {"t0": s.boundary.t0, "T": tau, "action": result.cost_leg1},
                    {"t0": tau, "T": s.boundary.T, "action": result.cost_leg2},
                ],
                "tau": tau,
                "xi": [result.crossing.xi.x, result.crossing.xi.y],
                "mu": result.crossing.mu,
                "hamiltonian_gap": result.crossing.gap_H,
                "abs_hamiltonian_gap": abs(result.crossing.gap_H),
                "impulsion_residual": result.crossing.residual_p,
                "iterations": result.iterations,
                "converged": result.converged,
                "init_action_estimate": init.action_estimate,
                "cost_history": list(result.cost_history),
            }
        )

    csv_path = Path(s.output.csv_path) if s.output.csv_path else Path(f"{s.name}.csv")
    summary_path = (
        Path(s.output.summary_path) if s.output.summary_path else Path(f"{s.name}.summary.json")
    )
    if not csv_path.is_absolute():
        csv_path = out_dir / csv_path
    if not summary_path.is_absolute():
        summary_path = out_dir / summary_path
    _write_csv(csv_path, rows)
    summary["csv"] = csv_path.name  # name only: summaries stay byte-reproducible
    _write_summary(summary_path, summary)
    return dict(summary, csv=str(csv_path))


def _check(name: str, value: float, tolerance: float) -> dict:
    return {
        "check": name,
        "value": float(value),
        "tolerance": float(tolerance),
        "passed": bool(value <= tolerance),
    }


def _closed_form_checks(
    phase: QuadraticPhase, bc: BoundaryConditions, n_oracle: int, prefix: str = ""
) -> list[dict]:
    traj = plan_single_phase(phase, bc)
    action = action_closed_form(phase, bc).action
    sampled = DiscreteTrajectory(
        times=np.linspace(bc.t0, bc.T, n_oracle + 1),
        positions=traj.positions(np.linspace(bc.t0, bc.T, n_oracle + 1)),
    )
    gap = abs(discrete_action(sampled, phase, phase.k) - action)

    interior = bc.t0 + (0.02 + 0.96 * np.arange(50) / 49.0) * bc.duration
    h = 1e-5
    second = (
        traj.positions(interior + h) - 2.0 * traj.positions(interior) + traj.positions(interior - h)
    ) / (h * h)
    centered = traj.positions(interior) - phase.center.as_array()
    el = phase.k * second + phase.u0 * centered
    el_max = float(np.max(np.hypot(el[:, 0], el[:, 1])))
    el_scale = 1.0 + float(np.max(np.hypot(centered[:, 0], centered[:, 1]))) * abs(phase.u0)

    ts = np.linspace(bc.t0, bc.T, 1000)
    vel = traj.velocities(ts)
    energies = 0.5 * phase.k * np.einsum("ij,ij->i", vel, vel) + intensity_at(
        phase, traj.positions(ts)
    )
    drift = float(np.max(np.abs(energies - energies[0])))

    return [
        _check(prefix + "action_quadrature_gap", gap, 1e-4 * (1.0 + abs(action))),
        _check(prefix + "euler_lagrange_residual", el_max, 1e-4 * el_scale),
        _check(prefix + "energy_drift", drift, 1e-8 * (1.0 + abs(energies[0]))),
    ]


def _check_trajectory_file(s: Scenario, path: Path) -> list[dict]:
    """Re-verify a trajectory CSV against the scenario's map (closed_form and
    aoa scenarios; online traces are piecewise and not checkable this way)."""
    if s.planner == "mpc":
        raise ValidationError("trajectory file checking supports closed_form and aoa scenarios")
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if header != CSV_HEADER:
            raise ParseError(f"unexpected CSV header {header}")
        data = np.array([[float(v) for v in row] for row in reader])
    times, pos, vel, regions = data[:, 0], data[:, 1:3], data[:, 3:5], data[:, 7].astype(int)
    if len(times) < 6:
        raise ValidationError("trajectory file too short to check")
    dt = times[1] - times[0]

    if s.map.kind == "biphase":
        traffic_map = s.biphase_map()
        phases = {r: traffic_map.phase_of_region(r) for r in (1, 2)}
    else:
        phases = {1: s.single_phase(), 2: s.single_phase()}

    switches = np.nonzero(np.diff(regions) != 0)[0]
    exclude = np.zeros(len(times), dtype=bool)
    for sw in switches:
        exclude[max(0, sw - 2) : sw + 4] = True

    el_max = 0.0
    el_scale = 1.0
    energies = []
    for i in range(len(times)):
        phase = phases[int(regions[i])]
        centered = pos[i] - phase.center.as_array()
        energies.append(0.5 * phase.k * float(vel[i] @ vel[i])
                        + 0.5 * phase.u0 * float(centered @ centered) + phase.u1)
        if 0 < i < len(times) - 1 and not exclude[i]:
            second = (pos[i - 1] - 2.0 * pos[i] + pos[i + 1]) / (dt * dt)
            r = phase.k * second + phase.u0 * centered
            el_max = max(el_max, float(np.hypot(r[0], r[1])))
            el_scale = max(el_scale, 1.0 + abs(phase.u0) * float(np.hypot(*centered)))
    energies = np.asarray(energies)
    drift = float(np.max(np.abs(energies[~exclude] - energies[0])))
    return [
        _check("file_euler_lagrange_residual", el_max, 1e-3 * el_scale),
        _check("file_energy_drift", drift, 1e-6 * (1.0 + abs(energies[0]))),
    ]


def verify_scenario(
    s: Scenario, n_oracle: int = 10_000, trajectory_csv: Optional[Path] = None
) -> dict:
    """Machine-readable verification report for a scenario."""
    if trajectory_csv is not None:
        checks = _check_trajectory_file(s, trajectory_csv)
    elif s.planner == "closed_form":
        checks = _closed_form_checks(s.single_phase(), s.boundary, n_oracle)
    elif s.planner == "mpc":
        traffic_map = s.biphase_map()
        trace = mpc_plan(traffic_map, s.boundary, s.mpc_params)
        end_err = float(np.hypot(*(trace.positions[-1] - s.boundary.zT.as_array())))
        half = mpc_plan(
            traffic_map,
            s.boundary,
            MpcParams(dt=s.mpc_params.dt / 2.0, region_hysteresis=s.mpc_params.region_hysteresis),
        )
        refine = abs(trace.action_estimate - half.action_estimate)
        checks = [
            _check("endpoint_error", end_err, 1e-6),
            _check("action_refinement_gap", refine, 1e-2 * (1.0 + abs(trace.action_estimate))),
        ]
    else:
        traffic_map = s.biphase_map()
        init = mpc_plan(traffic_map, s.boundary, s.mpc_params)
        result = aoa_optimize(traffic_map, s.boundary, init, s.aoa_params)
        checks = []
        for label, leg in (("leg1_", result.leg1), ("leg2_", result.leg2)):
            checks.extend(_closed_form_checks(leg.phase, leg.bc, n_oracle, prefix=label))
        iface = traffic_map.interface
        hist = result.cost_history
        eps = 1e-8 * (1.0 + abs(hist[0]))
        worst_rise = max(
            (hist[i + 1] - hist[i] for i in range(len(hist) - 1)), default=0.0
        )
        checks.extend(
            [
                _check("hamiltonian_gap", abs(result.crossing.gap_H), 1e-4),
                _check("impulsion_residual", result.crossing.residual_p, 1e-4),
                _check(
                    "crossing_on_interface",
                    abs(interface_value(iface, result.crossing.xi) - iface.level),
                    1e-9 * (1.0 + abs(iface.level)),
                ),
                _check("cost_history_monotone", worst_rise, eps),
            ]
        )
    return {
        "scenario": s.name,
        "planner": s.planner,
        "passed": all(c["passed"] for c in checks),
        "checks": checks,
    }


def _load_scenario(path: Path) -> Scenario:
    return parse_scenario(path.read_text(), default_name=path.stem)


def _print_report(report: dict) -> None:
    for c in report["checks"]:
        status = "pass" if c["passed"] else "FAIL"
        print(f"  [{status}] {c['check']}: {c['value']:.3e} (tol {c['tolerance']:.3e})")
    print(f"{report['scenario']}: {'ok' if report['passed'] else 'VERIFICATION FAILED'}")


def _cmd_plan(args) -> int:
    s = _load_scenario(Path(args.scenario))
    summary = run_scenario(s, Path(args.out), samples=args.samples)
    print(f"{s.name}: action={summary['action']:.9g} -> {summary['csv']}")
    return EXIT_OK


def _cmd_verify(args) -> int:
    s = _load_scenario(Path(args.scenario))
    trajectory = Path(args.trajectory) if args.trajectory else None
    report = verify_scenario(s, n_oracle=args.oracle_n, trajectory_csv=trajectory)
    _print_report(report)
    if args.out:
        _write_summary(Path(args.out) / f"{s.name}.verify.json", report)
    return EXIT_OK if report["passed"] else EXIT_VERIFY


def _cmd_batch(args) -> int:
    root = Path(args.scenario)
    files = sorted(p for p in root.glob("*.yaml")) + sorted(p for p in root.glob("*.yml"))
    if not files:
        raise ValidationError(f"no scenario files (*.yaml) found under {root}")
    out = Path(args.out)

    def one(path: Path):
        try:
            summary = run_scenario(_load_scenario(path), out)
            return path.name, None, summary
        except UavTrajError as exc:
            return path.name, exc, None

    with ThreadPoolExecutor(max_workers=min(8, len(files))) as pool:
        results = list(pool.map(one, files))
    worst = EXIT_OK
    for name, exc, summary in results:
        if exc is None:
            print(f"{name}: ok (action={summary['action']:.9g})")
        else:
            print(f"{name}: {type(exc).__name__}: {exc}", file=sys.stderr)
            worst = max(worst, _exit_code_for(exc))
    return worst


def _exit_code_for(exc: Exception) -> int:
    if isinstance(exc, ParseError):
        return EXIT_PARSE
    if isinstance(exc, ValidationError):
        return EXIT_VALIDATION
    if isinstance(exc, VerificationFailure):
        return EXIT_VERIFY
    if isinstance(exc, PlannerError):
        return EXIT_PLANNER
    return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavtraj",
        description="Plan and verify aerial base-station trajectories over "
        "quadratic traffic maps.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s (kernels: {kernels.BACKEND})"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    plan = sub.add_parser("plan", help="plan a scenario; write CSV + summary")
    plan.add_argument("--scenario", required=True, help="scenario YAML file")
    plan.add_argument("--out", default=".", help="output directory")
    plan.add_argument("--samples", type=int, default=None, help="CSV rows override")
    plan.set_defaults(func=_cmd_plan)

    verify = sub.add_parser("verify", help="verify a scenario against the oracle")
    verify.add_argument("--scenario", required=True)
    verify.add_argument("--out", default=None, help="directory for the verify report")
    verify.add_argument("--oracle-n", type=int, default=10_000, help="oracle grid intervals")
    verify.add_argument(
        "--trajectory", default=None, help="check an existing trajectory CSV instead"
    )
    verify.set_defaults(func=_cmd_verify)

    batch = sub.add_parser("batch", help="run every scenario in a directory")
    batch.add_argument("--scenario", required=True, help="directory of scenario files")
    batch.add_argument("--out", default=".", help="output directory")
    batch.set_defaults(func=_cmd_batch)

    schema = sub.add_parser("schema", help="print the scenario config reference")
    schema.set_defaults(func=lambda _args: (print(SCHEMA_REFERENCE), EXIT_OK)[1])
    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UavTrajError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return _exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
