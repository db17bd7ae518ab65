"""Command-line interface: solve, sweep, zerot, evolve, verify.

Every run writes its primary artifact (CSV by default, JSON on request)
plus a self-describing summary JSON carrying the parameters, headline
results and the hbar = m = 1 units block. Identical configuration and
seed always reproduce byte-identical outputs.

Exit codes: 0 success, 1 runtime/solver failure (diagnostics JSON on
stderr), 2 invalid usage or parameters.
"""

from __future__ import annotations

import argparse
import dataclasses
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import EvolutionConfig, MovingPacket, evolve
from .errors import ParameterError, SelfTrapError, SolverError
from .numerics import SpatialGrid
from .profile import ProfileParams, solve_profile, sweep_temperature
from .serialize import (
    dumps_stable,
    fields_csv,
    profile_csv,
    snapshots_csv,
    summary_dict,
    sweep_csv,
)
from .zerot import amplitude_profile, box_potential, density_profile, zero_t_from_ubar

OUTPUT_DIR_ENV = "SELFTRAP_OUTPUT_DIR"

_DEFAULT_BASENAMES = {
    "solve": "profile",
    "sweep": "sweep",
    "zerot": "zerot",
    "evolve": "evolution",
    "verify": "verify",
}


@dataclass(frozen=True)
class RunConfig:
    """Validated bundle of one CLI invocation."""

    command: str
    T: float | None = None
    u0: float | None = None
    ubar0: float | None = None
    vc: float | None = None
    t_final: float | None = None
    dt: float | None = None
    points: int | None = None
    stride: int = 500
    t_list: str | None = None
    shift_potential: bool = False
    out: str | None = None
    output_dir: str | None = None
    output_format: str = "csv"
    seed: int = 42

    def __post_init__(self):
        if self.command not in _DEFAULT_BASENAMES:
            raise ParameterError(f"unknown command {self.command!r}")
        if self.output_format not in ("csv", "json"):
            raise ParameterError(f"unknown format {self.output_format!r}")

    def replace(self, **kwargs) -> "RunConfig":
        return dataclasses.replace(self, **kwargs)

    @property
    def basename(self) -> str:
        return self.out or _DEFAULT_BASENAMES[self.command]

    def resolve_dir(self) -> Path:
        d = self.output_dir or os.environ.get(OUTPUT_DIR_ENV) or "."
        path = Path(d)
        path.mkdir(parents=True, exist_ok=True)
        return path


def parse_t_list(spec: str) -> list[float]:
    """Either comma-separated values or start:stop:{lin|log}:count."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 4:
            raise ParameterError(
                f"bad T list {spec!r}: expected start:stop:{{lin|log}}:count"
            )
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(parts[3])
        except ValueError as err:
            raise ParameterError(f"bad T list {spec!r}: {err}") from err
        kind = parts[2]
        if count < 1:
            raise ParameterError("T list count must be >= 1")
        if kind == "lin":
            values = np.linspace(start, stop, count)
        elif kind == "log":
            if start <= 0 or stop <= 0:
                raise ParameterError("log spacing needs positive endpoints")
            values = np.geomspace(start, stop, count)
        else:
            raise ParameterError(f"unknown T spacing {kind!r} (use lin or log)")
    else:
        try:
            values = np.array([float(tok) for tok in spec.split(",") if tok])
        except ValueError as err:
            raise ParameterError(f"bad T list {spec!r}: {err}") from err
    if values.size == 0 or np.any(values <= 0):
        raise ParameterError("T values must all be positive")
    return [float(v) for v in values]


def _write(path: Path, text: str) -> None:
    path.write_bytes(text.encode("utf-8"))


def _columns_json(names: list[str], columns: list[np.ndarray]) -> dict:
    return {name: list(map(float, col)) for name, col in zip(names, columns)}


def _require(config: RunConfig, *fields: str) -> None:
    missing = [f for f in fields if getattr(config, f) is None]
    if missing:
        raise ParameterError(
            f"{config.command}: missing required parameter(s) {', '.join(missing)}"
        )


def _run_solve(config: RunConfig, outdir: Path) -> list[Path]:
    _require(config, "T", "u0")
    n = config.points or 4097
    sol = solve_profile(ProfileParams(T=config.T, U0=config.u0), n_points=n)
    base = outdir / config.basename
    artifacts = []
    if config.output_format == "csv":
        data_path = base.with_suffix(".csv")
        _write(data_path, profile_csv(sol, shift_potential=config.shift_potential))
    else:
        U = sol.U.values - sol.U.values.min() if config.shift_potential else sol.U.values
        data_path = base.with_suffix(".json")
        _write(
            data_path,
            dumps_stable(
                _columns_json(
                    ["q", "rho", "R", "U"],
                    [sol.grid.points, sol.rho.values, sol.R.values, U],
                )
            )
            + "\n",
        )
    artifacts.append(data_path)
    summary = summary_dict(
        "solve",
        {
            "T": config.T,
            "u0": config.u0,
            "points": n,
            "shift_potential": config.shift_potential,
            "seed": config.seed,
        },
        {
            "L_m": sol.L_m,
            "U_bar": sol.U_bar,
            "Z": sol.Z,
            "entropy": sol.entropy,
        },
    )
    summary_path = Path(str(base) + ".summary.json")
    _write(summary_path, dumps_stable(summary) + "\n")
    artifacts.append(summary_path)
    return artifacts


def _run_sweep(config: RunConfig, outdir: Path) -> list[Path]:
    _require(config, "u0", "t_list")
    n = config.points or 4097
    T_values = parse_t_list(config.t_list)
    records = sweep_temperature(T_values, U0=config.u0, n_points=n)
    base = outdir / config.basename
    artifacts = []
    if config.output_format == "csv":
        data_path = base.with_suffix(".csv")
        _write(data_path, sweep_csv(records))
    else:
        data_path = base.with_suffix(".json")
        cols = {
            "T": [r.T for r in records],
            "L_m": [r.L_m for r in records],
            "U_bar": [r.U_bar for r in records],
            "entropy": [r.entropy for r in records],
            "Z": [r.Z for r in records],
        }
        _write(data_path, dumps_stable(cols) + "\n")
    artifacts.append(data_path)
    summary = summary_dict(
        "sweep",
        {
            "u0": config.u0,
            "T_list": config.t_list,
            "points": n,
            "seed": config.seed,
        },
        {
            "n_records": len(records),
            "L_m_first": records[0].L_m,
            "L_m_last": records[-1].L_m,
            "U_bar_first": records[0].U_bar,
            "U_bar_last": records[-1].U_bar,
        },
    )
    summary_path = Path(str(base) + ".summary.json")
    _write(summary_path, dumps_stable(summary) + "\n")
    artifacts.append(summary_path)
    return artifacts


def _run_zerot(config: RunConfig, outdir: Path) -> list[Path]:
    _require(config, "ubar0")
    n = config.points or 4097
    lim = zero_t_from_ubar(config.ubar0)
    grid = lim.support_grid(n)
    R0 = amplitude_profile(lim, grid)
    rho0 = density_profile(lim, grid)
    U0 = box_potential(lim, grid)
    base = outdir / config.basename
    artifacts = []
    if config.output_format == "csv":
        data_path = base.with_suffix(".csv")
        _write(data_path, fields_csv(grid.points, rho0, R0, U0))
    else:
        data_path = base.with_suffix(".json")
        _write(
            data_path,
            dumps_stable(
                _columns_json(
                    ["q", "rho", "R", "U"],
                    [grid.points, rho0.values, R0.values, U0.values],
                )
            )
            + "\n",
        )
    artifacts.append(data_path)
    summary = summary_dict(
        "zerot",
        {"ubar0": config.ubar0, "points": n, "seed": config.seed},
        {"A0": lim.A0, "L0": lim.L0, "k0": lim.k0},
    )
    summary_path = Path(str(base) + ".summary.json")
    _write(summary_path, dumps_stable(summary) + "\n")
    artifacts.append(summary_path)
    return artifacts


def _run_evolve(config: RunConfig, outdir: Path) -> list[Path]:
    _require(config, "ubar0", "vc", "t_final", "dt")
    n = config.points or 8192
    lim = zero_t_from_ubar(config.ubar0)
    packet = MovingPacket(lim, config.vc)
    lo = min(0.0, config.vc * config.t_final) - lim.L0
    hi = max(0.0, config.vc * config.t_final) + lim.L0
    margin = 1.5 * lim.L0
    grid = SpatialGrid(lo - margin, hi + margin, n)
    evo = EvolutionConfig(
        embedding_grid=grid,
        dt=config.dt,
        t_final=config.t_final,
        snapshot_stride=config.stride,
        reference=packet,
    )
    out = evolve(packet.sample(grid, 0.0), evo)
    base = outdir / config.basename
    artifacts = []
    data_path = base.with_suffix(".csv" if config.output_format == "csv" else ".json")
    if config.output_format == "csv":
        _write(data_path, snapshots_csv(out.times, out.snapshots))
    else:
        payload = {
            "times": list(map(float, out.times)),
            "snapshots": [
                {
                    "q": list(map(float, s.grid.points)),
                    "re_psi": list(map(float, s.values.real)),
                    "im_psi": list(map(float, s.values.imag)),
                }
                for s in out.snapshots
            ],
        }
        _write(data_path, dumps_stable(payload) + "\n")
    artifacts.append(data_path)
    report = out.report
    shape_payload = {
        "edge_exclusion": report.edge_exclusion,
        "interior_fraction": report.interior_fraction,
        "norm_drifts": list(map(float, report.norm_drifts)),
        "shape_errors": (
            None
            if report.shape_errors is None
            else list(map(float, report.shape_errors))
        ),
        "times": list(map(float, report.times)),
        "truncated": report.truncated,
    }
    shape_path = Path(str(base) + ".shape.json")
    _write(shape_path, dumps_stable(shape_payload) + "\n")
    artifacts.append(shape_path)
    summary = summary_dict(
        "evolve",
        {
            "dt": config.dt,
            "points": n,
            "seed": config.seed,
            "stride": config.stride,
            "t_final": config.t_final,
            "ubar0": config.ubar0,
            "vc": config.vc,
        },
        {
            "E_avg": packet.E_avg,
            "L0": lim.L0,
            "norm_drift_max": float(report.norm_drifts.max()),
            "omega0": packet.omega0,
            "p_avg": packet.p_avg,
            "shape_error_final": (
                None
                if report.shape_errors is None
                else float(report.shape_errors[-1])
            ),
            "xi_rate": packet.xi_rate,
        },
    )
    summary_path = Path(str(base) + ".summary.json")
    _write(summary_path, dumps_stable(summary) + "\n")
    artifacts.append(summary_path)
    return artifacts


def _run_verify(config: RunConfig, outdir: Path) -> list[Path]:
    from .verification import run_all

    results = run_all(seed=config.seed)
    for res in results:
        status = "PASS" if res.passed else "FAIL"
        line = f"{status} {res.name}"
        if res.notes and not res.passed:
            line += f" ({res.notes})"
        print(line)
        print(f"  [{res.runtime_s:.2f}s]", file=sys.stderr)
    payload = {
        "all_passed": all(r.passed for r in results),
        "criteria": [
            {
                "details": r.details,
                "name": r.name,
                "notes": r.notes,
                "passed": r.passed,
            }
            for r in results
        ],
        "seed": config.seed,
    }
    report_path = outdir / (config.basename + ".report.json")
    _write(report_path, dumps_stable(payload) + "\n")
    if not payload["all_passed"]:
        raise SolverError(
            "verification failed for: "
            + ", ".join(r.name for r in results if not r.passed),
            diagnostics={"report": str(report_path)},
        )
    return [report_path]


_RUNNERS = {
    "solve": _run_solve,
    "sweep": _run_sweep,
    "zerot": _run_zerot,
    "evolve": _run_evolve,
    "verify": _run_verify,
}


def execute(config: RunConfig) -> list[Path]:
    """Run one command; returns the written artifact paths."""
    outdir = config.resolve_dir()
    return _RUNNERS[config.command](config, outdir)


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selftrap",
        description=(
            "Self-trapped maximum-entropy wave packets: profile solver, "
            "temperature sweeps, box limit, packet evolution, verification."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--out", help="output basename (default per command)")
        p.add_argument(
            "--output-dir",
            help=f"output directory (default ${OUTPUT_DIR_ENV} or '.')",
        )
        p.add_argument(
            "--format",
            dest="output_format",
            choices=("csv", "json"),
            default="csv",
            help="primary artifact format",
        )
        p.add_argument("--seed", type=int, default=42, help="seed for stochastic checks")

    p = sub.add_parser("solve", help="solve one self-trapped profile")
    p.add_argument("--T", type=float, required=True, help="Lagrange parameter (> 0)")
    p.add_argument("--u0", type=float, required=True, help="central potential (> 0)")
    p.add_argument("--points", type=int, default=4097, help="resample points (odd)")
    p.add_argument(
        "--shift-potential",
        action="store_true",
        help="shift the serialized potential so its minimum is zero",
    )
    common(p)

    p = sub.add_parser("sweep", help="profile family across a T range")
    p.add_argument("--u0", type=float, required=True)
    p.add_argument(
        "--T-list",
        dest="t_list",
        required=True,
        help="start:stop:{lin|log}:count or comma-separated values",
    )
    p.add_argument("--points", type=int, default=4097)
    common(p)

    p = sub.add_parser("zerot", help="box-limit closed forms")
    p.add_argument("--ubar0", type=float, required=True, help="box depth (> 0)")
    p.add_argument("--points", type=int, default=4097)
    common(p)

    p = sub.add_parser("evolve", help="Crank-Nicolson packet evolution")
    p.add_argument("--ubar0", type=float, required=True)
    p.add_argument("--vc", type=float, required=True, help="packet velocity")
    p.add_argument("--t-final", dest="t_final", type=float, required=True)
    p.add_argument("--dt", type=float, required=True)
    p.add_argument("--points", type=int, default=8192)
    p.add_argument("--stride", type=int, default=500, help="snapshot stride in steps")
    common(p)

    p = sub.add_parser("verify", help="run the verification suite")
    common(p)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    kwargs = {k: v for k, v in vars(args).items() if v is not None}
    try:
        config = RunConfig(**kwargs)
        execute(config)
    except ParameterError as err:
        print(f"selftrap: parameter error: {err}", file=sys.stderr)
        return 2
    except SelfTrapError as err:
        diagnostics = getattr(err, "diagnostics", {})
        payload = {
            "error": type(err).__name__,
            "message": str(err),
            "diagnostics": diagnostics,
        }
        print(dumps_stable(payload), file=sys.stderr)
        return 1
    except OSError as err:
        payload = {
            "error": type(err).__name__,
            "message": str(err),
            "diagnostics": {"path": str(getattr(err, "filename", ""))},
        }
        print(dumps_stable(payload), file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
