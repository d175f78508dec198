"""Command-line front end: run experiments, emit reproducible CSV artifacts.

Every output file opens with a comment echoing the full configuration, and
reruns with the same configuration produce byte-identical bodies.  Floats
are written with shortest round-trip precision.  Exit codes: 0 success,
2 configuration error, 3 numerical failure, 4 I/O failure.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import uniform
from .errors import (
    DegenerateSpectrumError,
    GridError,
    RankError,
    RecoveryError,
    RegularizationError,
    SpecError,
    StabilityError,
    TruncationError,
)
from .forward import (
    TimeGrid,
    Waveform,
    mollified_delta,
    response_function,
    solve_forward_delta,
    solve_forward_ode,
    solve_forward_spectral,
)
from .inverse import Regularization, recover_string
from .model import build_matrices, read_spec_file
from .spectral import compute_spectral_data

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

_CONFIG_ERRORS = (SpecError, GridError, ValueError)
_NUMERICAL_ERRORS = (
    StabilityError,
    DegenerateSpectrumError,
    RankError,
    RecoveryError,
    RegularizationError,
    TruncationError,
)


def _fmt(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


@dataclass
class RunConfig:
    """Echoed verbatim into every emitted file header."""

    command: str
    options: dict = field(default_factory=dict)

    def echo(self) -> str:
        parts = [f"krein-string {self.command}"]
        parts += [f"{key}={value}" for key, value in self.options.items()]
        return " ".join(parts)


def _write_csv(path: Path, config: RunConfig, header: list[str], rows) -> None:
    lines = [f"# {config.echo()}", ",".join(header)]
    for row in rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _control_waveform(descriptor: str, grid: TimeGrid) -> Waveform:
    if descriptor.startswith("delta"):
        _, _, width = descriptor.partition(":")
        return mollified_delta(grid, float(width) if width else 0.02)
    xi = uniform.parse_test_function(descriptor)
    return Waveform(grid=grid, values=np.asarray(xi(grid.times), dtype=float))


# ---------------------------------------------------------------------------
# Commands.


def _cmd_spectral(args) -> int:
    config = RunConfig("spectral", {"spec": args.spec, "out": args.out})
    spec = read_spec_file(args.spec)
    data = compute_spectral_data(build_matrices(spec))
    rows = [
        (k + 1, data.eigenvalues[k], data.weights[k]) for k in range(data.n_modes)
    ]
    _write_csv(Path(args.out) / "spectral.csv", config, ["k", "lambda", "omega"], rows)
    return EXIT_OK


def _cmd_forward(args) -> int:
    config = RunConfig(
        "forward",
        {
            "spec": args.spec,
            "T": args.T,
            "steps": args.steps,
            "control": args.control,
            "solver": args.solver,
            "out": args.out,
        },
    )
    spec = read_spec_file(args.spec)
    mats = build_matrices(spec)
    grid = TimeGrid(horizon=args.T, n_steps=args.steps)
    l1 = float(spec.lengths[0])
    if args.solver == "ode":
        control = _control_waveform(args.control, grid)
        traj = solve_forward_ode(mats, control, l1)
    else:
        data = compute_spectral_data(mats)
        if args.control == "delta":
            traj = solve_forward_delta(data, l1, grid)
        else:
            control = _control_waveform(args.control, grid)
            traj = solve_forward_spectral(mats, data, control, l1)
    header = ["t"] + [f"u_{i + 1}" for i in range(mats.order)]
    rows = [
        (t, *traj.states[j]) for j, t in enumerate(grid.times)
    ]
    _write_csv(Path(args.out) / "trajectory.csv", config, header, rows)
    return EXIT_OK


def _cmd_response(args) -> int:
    config = RunConfig(
        "response",
        {"spec": args.spec, "T": args.T, "steps": args.steps, "out": args.out},
    )
    spec = read_spec_file(args.spec)
    data = compute_spectral_data(build_matrices(spec))
    grid = TimeGrid(horizon=args.T, n_steps=args.steps)
    r = response_function(data, float(spec.lengths[0]), grid)
    rows = list(zip(grid.times, r.values))
    _write_csv(Path(args.out) / "response.csv", config, ["t", "r"], rows)
    return EXIT_OK


def _read_response_csv(path: str) -> Waveform:
    times = []
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#") or line.startswith("t,"):
                continue
            t_str, r_str = line.split(",")
            times.append(float(t_str))
            values.append(float(r_str))
    if len(times) < 3:
        raise GridError(f"{path}: too few samples for a response")
    times_arr = np.asarray(times)
    steps = np.diff(times_arr)
    if not np.allclose(steps, steps[0], rtol=1e-9, atol=1e-12):
        raise GridError(f"{path}: response grid is not uniform")
    grid = TimeGrid(horizon=float(times_arr[-1]), n_steps=len(times_arr) - 1)
    return Waveform(grid=grid, values=np.asarray(values))


def _emit_recovery(out_dir: Path, config: RunConfig, result) -> None:
    diag = result.diagnostics
    rows = []
    for k in range(len(result.recovered_masses)):
        rows.append(
            (
                k + 1,
                result.recovered_masses[k],
                result.recovered_b[k],
                result.recovered_a[k],
                result.recovered_lengths[k],
                diag.residuals[k],
                diag.condition_numbers[k],
            )
        )
    _write_csv(
        out_dir / "recovery.csv",
        config,
        ["k", "m_k", "b_k", "a_k", "l_k", "residual_k", "cond_k"],
        rows,
    )
    with open(out_dir / "recovery.csv", "a", encoding="utf-8") as fh:
        fh.write(f"# l_N={_fmt(result.recovered_lengths[-1])}\n")
    sv_rows = [(i + 1, s) for i, s in enumerate(diag.singular_values)]
    _write_csv(out_dir / "singular_values.csv", config, ["i", "sigma_i"], sv_rows)


def _cmd_invert(args) -> int:
    config = RunConfig(
        "invert",
        {
            "response": args.response,
            "l1": args.l1,
            "steps": args.steps,
            "threshold": args.threshold,
            "max_residual": args.max_residual,
            "out": args.out,
        },
    )
    r = _read_response_csv(args.response)
    grid = TimeGrid(horizon=r.grid.horizon / 2.0, n_steps=args.steps)
    reg = Regularization(threshold=args.threshold, max_residual=args.max_residual)
    result = recover_string(r, args.l1, grid, reg)
    _emit_recovery(Path(args.out), config, result)
    diag = result.diagnostics
    print(
        f"rank={diag.rank} l1_input={_fmt(diag.l1_input)} "
        f"l1_estimate={_fmt(diag.l1_estimate)} "
        f"last_length={_fmt(result.recovered_lengths[-1])}"
    )
    return EXIT_OK


def _cmd_roundtrip(args) -> int:
    config = RunConfig(
        "roundtrip",
        {
            "spec": args.spec,
            "T": args.T,
            "steps": args.steps,
            "l1": args.l1,
            "oversample": args.oversample,
            "noise": args.noise,
            "seed": args.seed,
            "threshold": args.threshold,
            "max_residual": args.max_residual,
            "out": args.out,
        },
    )
    spec = read_spec_file(args.spec)
    data = compute_spectral_data(build_matrices(spec))
    true_l1 = float(spec.lengths[0])
    l1 = args.l1 if args.l1 is not None else true_l1
    grid = TimeGrid(horizon=args.T, n_steps=args.steps)
    fine = TimeGrid(horizon=2.0 * args.T, n_steps=2 * args.oversample * args.steps)
    r = response_function(data, true_l1, fine)
    if args.noise > 0.0:
        rng = np.random.default_rng(args.seed)
        noisy = r.values + args.noise * rng.standard_normal(len(r.values))
        r = Waveform(grid=fine, values=noisy)
    reg = Regularization(threshold=args.threshold, max_residual=args.max_residual)
    result = recover_string(r, l1, grid, reg)
    _emit_recovery(Path(args.out), config, result)

    err_m = err_l = np.inf
    if result.diagnostics.rank == spec.n_masses:
        err_m = float(
            np.max(np.abs(result.recovered_masses - spec.masses) / spec.masses)
        )
        err_l = float(
            np.max(np.abs(result.recovered_lengths - spec.lengths) / spec.lengths)
        )
    print(f"max_rel_err_m={_fmt(err_m)} max_rel_err_l={_fmt(err_l)}")
    return EXIT_OK


def _cmd_uniform_sweep(args) -> int:
    ns = [int(tok) for tok in args.N.split(",") if tok.strip()]
    config = RunConfig(
        "uniform-sweep",
        {
            "prop": args.prop,
            "N": args.N,
            "xi": args.xi,
            "t": args.t,
            "k": args.k,
            "out": args.out,
        },
    )
    rows = []
    if args.prop == 1:
        # impulse components against the spectral sum, worst case over j and t
        for n in ns:
            data = uniform.uniform_eigen(n)
            grid = TimeGrid(horizon=1.0, n_steps=max(4 * n, 64))
            traj = solve_forward_delta(data, 1.0 / n, grid)
            worst = 0.0
            for j in (1, max(n // 2, 1)):
                closed = np.array(
                    [uniform.delta_solution(n, j, t) for t in grid.times[1:]]
                )
                worst = max(worst, float(np.max(np.abs(closed - traj.states[1:, j - 1]))))
            rows.append((n, 0.0, worst, worst))
    elif args.prop in (2, 3):
        xi = uniform.parse_test_function(args.xi)
        if args.prop == 2:
            target = float(xi(0.0))
            for n in ns:
                res = uniform.pair_response(n, xi)
                rows.append((n, target, res.value, abs(res.value - target)))
        else:
            if xi.derivative is None:
                raise ValueError(f"{args.xi!r} has no analytic derivative for prop 3")
            target = float(xi.derivative(0.0))
            for n in ns:
                res = uniform.pair_corrected_response(n, xi)
                rows.append((n, target, res.value, abs(res.value - target)))
    elif args.prop == 4:
        target = float(np.sin(args.k * args.t))
        for n in ns:
            value = uniform.pair_solution_with_sine(n, args.t, args.k)
            rows.append((n, target, value, abs(value - target)))
    else:
        raise ValueError(f"unknown proposition {args.prop}")
    _write_csv(
        Path(args.out) / f"uniform_prop{args.prop}.csv",
        config,
        ["N", "target", "value", "abs_error"],
        rows,
    )
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser and entry point.


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="krein-string",
        description="Forward/inverse experiments for finite point-mass strings.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--out", default="out", help="output directory")
        p.add_argument("--seed", type=int, default=0, help="seed for randomized runs")

    p = sub.add_parser("spectral", help="eigenvalues and weights of a string")
    p.add_argument("--spec", required=True)
    add_common(p)
    p.set_defaults(func=_cmd_spectral)

    p = sub.add_parser("forward", help="trajectory under a boundary control")
    p.add_argument("--spec", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--control", default="delta", help="delta[:width] or test-function descriptor")
    p.add_argument("--solver", choices=("spectral", "ode"), default="spectral")
    add_common(p)
    p.set_defaults(func=_cmd_forward)

    p = sub.add_parser("response", help="boundary response function")
    p.add_argument("--spec", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    add_common(p)
    p.set_defaults(func=_cmd_response)

    p = sub.add_parser("invert", help="recover a string from a response CSV on [0,2T]")
    p.add_argument("--response", required=True)
    p.add_argument("--l1", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--threshold", type=float, default=1e-8)
    p.add_argument("--max-residual", dest="max_residual", type=float, default=5e-2)
    add_common(p)
    p.set_defaults(func=_cmd_invert)

    p = sub.add_parser("roundtrip", help="generate exact response, invert, compare")
    p.add_argument("--spec", required=True)
    p.add_argument("--T", type=float, required=True)
    p.add_argument("--steps", type=int, required=True)
    p.add_argument("--l1", type=float, default=None, help="defaults to the true l_1")
    p.add_argument("--oversample", type=int, default=8)
    p.add_argument("--noise", type=float, default=0.0)
    p.add_argument("--threshold", type=float, default=1e-8)
    p.add_argument("--max-residual", dest="max_residual", type=float, default=5e-2)
    add_common(p)
    p.set_defaults(func=_cmd_roundtrip)

    p = sub.add_parser("uniform-sweep", help="constant-density convergence experiments")
    p.add_argument("--prop", type=int, required=True, choices=(1, 2, 3, 4))
    p.add_argument("--N", required=True, help="comma-separated segment counts")
    p.add_argument("--xi", default="gauss:0.0,0.3")
    p.add_argument("--t", type=float, default=0.3)
    p.add_argument("--k", type=int, default=1)
    add_common(p)
    p.set_defaults(func=_cmd_uniform_sweep)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code not in (0, None) else EXIT_OK
    try:
        return args.func(args)
    except _NUMERICAL_ERRORS as exc:
        print(f"error_code={EXIT_NUMERICAL} detail={exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except _CONFIG_ERRORS as exc:
        print(f"error_code={EXIT_CONFIG} detail={exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error_code={EXIT_IO} detail={exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
