"""Config-driven command line for channel verification and experiment sweeps.

Subcommands: verify, converge, noise-sweep, pairwise, bell. Each accepts a
JSON config file (same object syntax as the state/channel files) whose keys
match the flag names; explicit flags win over config values. Exit codes:
0 success, 1 verification-negative, 2 input error.

Results are CSV files with '.' decimals and 17 significant digits, so a rerun
with identical inputs and seed reproduces them byte for byte. Relative
default output paths land in $QSTEER_OUT_DIR (or the working directory).
"""

from __future__ import annotations

import argparse
import os
import sys
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import io
from .channels import (
    KrausChannel,
    Trajectory,
    apply,
    conjugate_channel,
    iterate,
    verify_channel,
)
from .constructors import (
    REGISTRY_NAMES,
    build_named_channel,
    pairwise_channel,
    rotation_onto,
    weak_swap_channel,
)
from .noise import KINDS, NoiseModel, SeededStream, mean_fidelity, noisy_trajectory
from .states import DensityOperator, PureState, target_fidelity

ASYMPTOTE_DELTA = 1e-10
ASYMPTOTE_CAP = 100_000

NAMED_STATES = {
    "zero": [1.0, 0.0],
    "one": [0.0, 1.0],
    "plus": [1.0, 1.0],
    "minus": [1.0, -1.0],
    "y+": [1.0, 1.0j],
    "y-": [1.0, -1.0j],
    "uu": [1.0, 0.0, 0.0, 0.0],
    "ud": [0.0, 1.0, 0.0, 0.0],
    "du": [0.0, 0.0, 1.0, 0.0],
    "dd": [0.0, 0.0, 0.0, 1.0],
    "bell": [1.0, 0.0, 0.0, 1.0],
}


def _fmt(x: float) -> str:
    return format(float(x), ".17g")


def _write_csv(path, header, rows, meta=()) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        for line in meta:
            fh.write(f"# {line}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def parse_state(spec: str) -> PureState | DensityOperator:
    """Resolve a state spec: a file path, a named state, basis:K:D or mixed:D."""
    if os.path.exists(spec):
        return io.load_state(spec)
    if spec in NAMED_STATES:
        return PureState.normalized(NAMED_STATES[spec])
    if spec.startswith("basis:"):
        parts = spec.split(":")
        if len(parts) == 3:
            return PureState.basis(int(parts[1]), int(parts[2]))
    if spec.startswith("mixed:"):
        return DensityOperator.maximally_mixed(int(spec.split(":", 1)[1]))
    raise io.FormatError(
        f"state spec {spec!r} is neither a file nor a named state "
        f"({', '.join(sorted(NAMED_STATES))}, basis:K:D, mixed:D)"
    )


def _pure(spec: str, what: str) -> PureState:
    state = parse_state(spec)
    if not isinstance(state, PureState):
        raise io.FormatError(f"{what} must be a pure state, got a density matrix")
    return state


def _density(spec: str) -> DensityOperator:
    state = parse_state(spec)
    return state.density() if isinstance(state, PureState) else state


def resolve_channel(spec: str) -> tuple[KrausChannel, PureState | None]:
    """A channel file path, or a registry name with optional k=v parameters."""
    if os.path.exists(spec):
        return io.load_channel(spec), None
    name, _, params_str = spec.partition(":")
    if name in REGISTRY_NAMES:
        params = {}
        if params_str:
            for item in params_str.split(","):
                key, eq, value = item.partition("=")
                if not eq:
                    raise io.FormatError(f"channel parameter {item!r} is not key=value")
                params[key.strip()] = float(value)
        return build_named_channel(name, params)
    raise io.FormatError(
        f"channel spec {spec!r} is neither a file nor a registry name "
        f"({', '.join(REGISTRY_NAMES)})"
    )


def _option(args, config: dict, key: str, default=None):
    attr = "lambda_" if key == "lambda" else key.replace("-", "_")
    value = getattr(args, attr, None)
    if value is not None:
        return value
    if key in config:
        return config[key]
    return default


def _float_list(value, key: str) -> list[float]:
    if isinstance(value, (list, tuple)):
        return [float(v) for v in value]
    try:
        return [float(v) for v in str(value).split(",") if v != ""]
    except ValueError as exc:
        raise io.FormatError(f"field '{key}' holds a non-numeric entry: {value!r}") from exc


def _str_list(value) -> list[str]:
    if isinstance(value, (list, tuple)):
        return [str(v) for v in value]
    return [s for s in str(value).split(",") if s != ""]


def _out_path(args, config: dict, default_name: str) -> str:
    out = _option(args, config, "out")
    if out is not None:
        return str(out)
    return os.path.join(os.environ.get("QSTEER_OUT_DIR", "."), default_name)


def _config(args) -> dict:
    if getattr(args, "config", None) is None:
        return {}
    cfg = io.load_config(args.config)
    return cfg


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def cmd_verify(args) -> int:
    config = _config(args)
    channel_spec = _option(args, config, "channel")
    if channel_spec is None:
        raise io.FormatError("verify needs --channel (file or registry name)")
    channel, registry_target = resolve_channel(str(channel_spec))
    target_spec = _option(args, config, "target")
    if target_spec is not None:
        target = _pure(str(target_spec), "target")
    elif registry_target is not None:
        target = registry_target
    else:
        raise io.FormatError("verify needs --target for a channel loaded from a file")
    report = verify_channel(channel, target)
    print(f"completeness_defect: {report.completeness_defect:.6e}")
    print(f"fixed_point_defect:  {report.fixed_point_defect:.6e}")
    zs = ", ".join(f"{z.real:+.9f}{z.imag:+.9f}j" for z in report.eigenvalues_z)
    print(f"z:                   [{zs}]")
    print(f"z_norm_defect:       {report.z_norm_defect:.6e}")
    print(f"span_rank:           {report.span_rank} of {channel.dim}")
    print(f"gamma_estimate:      {report.gamma_estimate:.9f}")
    print(f"converging:          {'yes' if report.converging else 'no'}")
    return 0 if report.converging else 1


def _trajectory_rows(traj: Trajectory) -> list[list[str]]:
    rows = []
    for rec in traj.records:
        bloch = rec.bloch if rec.bloch is not None else ("", "", "")
        rows.append(
            [
                str(rec.step),
                _fmt(rec.fidelity),
                *(_fmt(b) if b != "" else "" for b in bloch),
                _fmt(rec.concurrence) if rec.concurrence is not None else "",
            ]
        )
    return rows


CONVERGE_HEADER = ["step", "fidelity", "bx", "by", "bz", "concurrence"]


def _write_trajectories(out: str, trajectories: list[Trajectory]) -> list[str]:
    if len(trajectories) == 1:
        paths = [out]
    else:
        stem, ext = os.path.splitext(out)
        paths = [f"{stem}_{k}{ext}" for k in range(len(trajectories))]
    for path, traj in zip(paths, trajectories):
        _write_csv(path, CONVERGE_HEADER, _trajectory_rows(traj))
    return paths


def _run_converge(channel: KrausChannel, target: PureState, initials, steps: int, out: str) -> int:
    trajectories = [iterate(channel, rho0, target, steps) for rho0 in initials]
    for path in _write_trajectories(out, trajectories):
        print(path)
    return 0


def cmd_converge(args) -> int:
    config = _config(args)
    channel_spec = _option(args, config, "channel")
    if channel_spec is None:
        raise io.FormatError("converge needs --channel (file or registry name)")
    channel, registry_target = resolve_channel(str(channel_spec))
    target_spec = _option(args, config, "target")
    if target_spec is not None:
        target = _pure(str(target_spec), "target")
    elif registry_target is not None:
        target = registry_target
    else:
        raise io.FormatError("converge needs --target for a channel loaded from a file")
    steps = int(_option(args, config, "steps", 50))
    if steps < 0:
        raise io.FormatError("field 'steps' must be nonnegative")
    initial_spec = _option(args, config, "initial", f"mixed:{channel.dim}")
    initials = [_density(s) for s in _str_list(initial_spec)]
    if not initials:
        raise io.FormatError("field 'initial' lists no states")
    out = _out_path(args, config, "converge.csv")
    return _run_converge(channel, target, initials, steps, out)


def _steering_channel(lam: float, target: PureState) -> KrausChannel:
    """Partial-swap qubit channel conjugated to steer toward ``target``."""
    base = weak_swap_channel(lam, 2, 0)
    return conjugate_channel(base, rotation_onto(PureState.basis(0, 2), target))


def cmd_noise_sweep(args) -> int:
    config = _config(args)
    lambdas = _float_list(_option(args, config, "lambda", [np.pi / 2]), "lambda")
    sigmas = _float_list(_option(args, config, "sigma", [0.1]), "sigma")
    kinds = _str_list(_option(args, config, "kind", "dephasing"))
    for kind in kinds:
        if kind not in KINDS:
            raise io.FormatError(f"field 'kind' must be one of {', '.join(KINDS)}")
    if not lambdas or not sigmas:
        raise io.FormatError("fields 'lambda' and 'sigma' must be nonempty grids")
    steps = int(_option(args, config, "steps", 1000))
    if steps < 1:
        raise io.FormatError("field 'steps' must be at least 1")
    trajectories = int(_option(args, config, "trajectories", 1))
    if trajectories < 1:
        raise io.FormatError("field 'trajectories' must be at least 1")
    seed = int(_option(args, config, "seed", 12345))
    target = _pure(str(_option(args, config, "target", "plus")), "target")
    initial_spec = _option(args, config, "initial")
    rho0 = _density(str(initial_spec)) if initial_spec is not None else target.density()
    out = _out_path(args, config, "noise_sweep.csv")

    channels = {lam: _steering_channel(lam, target) for lam in lambdas}
    cells = [
        (kind, lam, sigma)
        for kind in kinds
        for lam in lambdas
        for sigma in sigmas
    ]

    def run_cell(index_and_cell):
        index, (kind, lam, sigma) = index_and_cell
        model = NoiseModel(kind=kind, sigma=sigma)
        base = index * trajectories
        values = [
            mean_fidelity(
                noisy_trajectory(
                    channels[lam], model, rho0, target, steps, SeededStream(seed, base + t)
                )
            )
            for t in range(trajectories)
        ]
        return float(np.mean(values))

    workers = min(8, os.cpu_count() or 1, len(cells))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        means = list(pool.map(run_cell, enumerate(cells)))

    rows = [
        [_fmt(lam), _fmt(sigma), kind, _fmt(mean), str(trajectories), str(seed)]
        for (kind, lam, sigma), mean in zip(cells, means)
    ]
    _write_csv(out, ["lambda", "sigma", "kind", "mean_fidelity", "trajectories", "seed"], rows)
    print(out)
    return 0


def asymptotic_fidelity(channel: KrausChannel, rho0: DensityOperator, target: PureState) -> tuple[float, bool]:
    """Iterate until the fidelity settles (|dF| < 1e-10) or the step cap hits."""
    rho = rho0
    f = target_fidelity(rho, target)
    for _ in range(ASYMPTOTE_CAP):
        rho = apply(channel, rho)
        f_next = target_fidelity(rho, target)
        if abs(f_next - f) < ASYMPTOTE_DELTA:
            return f_next, True
        f = f_next
    return f, False


def cmd_pairwise(args) -> int:
    config = _config(args)
    lambdas = _float_list(_option(args, config, "lambda", [k * np.pi / 40 for k in range(0, 21)]), "lambda")
    if not lambdas:
        raise io.FormatError("field 'lambda' must be a nonempty grid")
    initial = PureState.basis(0, 4).density()
    out = _out_path(args, config, "pairwise.csv")
    rows = []
    for lam in lambdas:
        channel, target = pairwise_channel(lam)
        f_inf, settled = asymptotic_fidelity(channel, initial, target)
        rows.append([_fmt(lam), _fmt(f_inf), "1" if settled else "0"])
    meta = [f"asymptote rule: stop when |dF| < {ASYMPTOTE_DELTA:g}, cap {ASYMPTOTE_CAP} steps"]
    _write_csv(out, ["lambda", "f_infinity", "converged"], rows, meta=meta)
    print(out)
    return 0


def cmd_bell(args) -> int:
    config = _config(args)
    lam = float(_option(args, config, "lambda", np.pi / 5))
    steps = int(_option(args, config, "steps", 30))
    if steps < 0:
        raise io.FormatError("field 'steps' must be nonnegative")
    channel, target = build_named_channel("bell", {"lambda": lam})
    initial_spec = _option(args, config, "initial", "uu,dd,ud,du")
    initials = [_density(s) for s in _str_list(initial_spec)]
    out = _out_path(args, config, "bell.csv")
    return _run_converge(channel, target, initials, steps, out)


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qsteer",
        description="Verify and exercise control channels that steer states to a target.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p):
        p.add_argument("--config", help="JSON config file; flags override its fields")
        p.add_argument("--out", help="output CSV path")

    p = sub.add_parser("verify", help="check the convergence conditions of a channel")
    p.add_argument("--channel", help="channel file or registry name[:k=v,...]")
    p.add_argument("--target", help="target state (file or named state)")
    p.add_argument("--config", help="JSON config file; flags override its fields")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("converge", help="iterate a channel and record per-step data")
    p.add_argument("--channel", help="channel file or registry name[:k=v,...]")
    p.add_argument("--target", help="target state override (file or named state)")
    p.add_argument("--initial", help="comma-separated initial states")
    p.add_argument("--steps", type=int, help="number of channel applications")
    add_common(p)
    p.set_defaults(func=cmd_converge)

    p = sub.add_parser("noise-sweep", help="mean fidelity under alternating control and noise")
    p.add_argument("--lambda", dest="lambda_", help="comma-separated coupling strengths")
    p.add_argument("--sigma", help="comma-separated noise strengths")
    p.add_argument("--kind", help="noise kinds (dephasing, depolarising)")
    p.add_argument("--trajectories", type=int, help="trajectories per grid cell")
    p.add_argument("--steps", type=int, help="trajectory length N")
    p.add_argument("--seed", type=int, help="master seed")
    p.add_argument("--target", help="target state (default plus)")
    p.add_argument("--initial", help="initial state (default: the target)")
    add_common(p)
    p.set_defaults(func=cmd_noise_sweep)

    p = sub.add_parser("pairwise", help="asymptotic fidelity of the pairwise-interaction channel")
    p.add_argument("--lambda", dest="lambda_", help="comma-separated coupling strengths")
    add_common(p)
    p.set_defaults(func=cmd_pairwise)

    p = sub.add_parser("bell", help="fidelity and concurrence under the entangling channel")
    p.add_argument("--lambda", dest="lambda_", type=float, help="coupling strength")
    p.add_argument("--steps", type=int, help="number of channel applications")
    p.add_argument("--initial", help="comma-separated initial states")
    add_common(p)
    p.set_defaults(func=cmd_bell)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (io.FormatError, FileNotFoundError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
