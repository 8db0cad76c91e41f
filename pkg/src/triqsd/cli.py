"""Command-line batch runner.

    triqsd run --preset fig1b --outdir runs/fig1b
    triqsd run --config myrun.json --set n_traj=500 --set schedule.outer=10
    triqsd presets --prefix fig2

Exit codes: 0 success, 1 usage/config error, 2 validation error,
3 numerical fault, 4 I/O error.
"""

import argparse
import os
import sys
import time

import numpy as np

from . import __version__
from .backend import active_backend
from .config import (
    RunConfig,
    apply_overrides,
    get_preset,
    list_presets,
    load_config,
)
from .ensemble import DEFAULT_CHUNK, run_ensemble
from .errors import ConfigError, NumericalFault, TriqsdError, ValidationError
from .noise import NoisePath, sample_ou_block
from .oracles import dephasing_analytic
from .pulses import half_grid, segment_grid
from .runio import (
    write_coefficients_csv,
    write_metadata,
    write_oracle_csv,
    write_results_csv,
)


class _UsageError(ConfigError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); we own the exit codes
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="triqsd", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    run_p = sub.add_parser("run", help="execute one simulation run")
    run_p.add_argument("--config", help="path to a JSON run configuration")
    run_p.add_argument("--preset", help="name of a built-in scenario")
    run_p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="override a config key (dotted paths, JSON values)",
    )
    run_p.add_argument("--outdir", default=None, help="output directory (default runs/<name>)")
    run_p.add_argument("--n-traj", type=int, default=None, help="trajectory count override")
    run_p.add_argument("--seed", type=int, default=None, help="master seed override")
    run_p.add_argument(
        "--deterministic",
        action="store_true",
        help="pin the reduction chunking so output is independent of chunk overrides",
    )

    pre_p = sub.add_parser("presets", help="list built-in scenarios")
    pre_p.add_argument("--prefix", default=None, help="only names starting with this prefix")
    return parser


def _resolve_config(args) -> RunConfig:
    if bool(args.config) == bool(args.preset):
        raise _UsageError("exactly one of --config or --preset is required")
    config = load_config(args.config) if args.config else get_preset(args.preset)
    if args.overrides:
        config = apply_overrides(config, args.overrides)
    updates = {}
    if args.n_traj is not None:
        updates["n_traj"] = args.n_traj
    if args.seed is not None:
        updates["master_seed"] = args.seed
    if args.deterministic:
        updates["deterministic"] = True
    if updates:
        from dataclasses import replace

        config = replace(config, **updates)
    return config


def execute_run(config: RunConfig, outdir: str) -> dict:
    """Validate, simulate, and write result files; returns written paths."""
    config.validate()
    schedule = config.schedule.build(config.total_time)
    chunk = DEFAULT_CHUNK if config.deterministic else config.chunk_size
    started = time.perf_counter()
    series = run_ensemble(
        model=config.model,
        schedule=schedule,
        omega=config.omega,
        gamma=config.gamma,
        init=config.initial.build(),
        n_traj=config.n_traj,
        master_seed=config.master_seed,
        n_output=config.output_times,
        steps_per_segment=config.steps_per_segment,
        max_step=config.max_step,
        chunk_size=chunk,
        stderr_blocks=config.stderr_blocks,
        fidelity_convention=config.fidelity_convention,
        frame=config.frame,
    )
    wall = time.perf_counter() - started

    os.makedirs(outdir, exist_ok=True)
    name = config.run_name
    paths = {}
    results_path = os.path.join(outdir, "%s_results.csv" % name)
    write_results_csv(results_path, series, config)
    paths["results"] = results_path

    want_oracle = config.write_oracle == "always" or (
        config.write_oracle == "auto" and config.model == "dephasing"
    )
    if want_oracle and config.model == "dephasing":
        oracle = dephasing_analytic(
            schedule, config.omega, config.gamma, config.initial.build().density(), series.times
        )
        fid = oracle.fidelity_to(config.initial.build().density(), config.fidelity_convention)
        jx, jy, jz = oracle.expectation_series()
        tr = np.real(np.trace(oracle.rho, axis1=1, axis2=2))
        oracle_path = os.path.join(outdir, "%s_oracle.csv" % name)
        write_oracle_csv(oracle_path, series.times, fid, jx, jy, jz, tr, config)
        paths["oracle"] = oracle_path

    if config.dump_coefficients:
        from .coefficients import solve_dephasing, solve_dissipative

        grid = segment_grid(
            schedule,
            config.steps_per_segment,
            config.max_step
            if config.max_step is not None
            else min(0.1 / config.gamma, config.total_time / 2000.0),
        )
        solver = solve_dephasing if config.model == "dephasing" else solve_dissipative
        tables = solver(schedule, config.omega, config.gamma, grid)
        coeff_path = os.path.join(outdir, "%s_coefficients.csv" % name)
        write_coefficients_csv(coeff_path, tables)
        paths["coefficients"] = coeff_path

    if config.dump_noise > 0:
        from .runio import _fmt

        grid = segment_grid(
            schedule,
            config.steps_per_segment,
            config.max_step
            if config.max_step is not None
            else min(0.1 / config.gamma, config.total_time / 2000.0),
        )
        tau = half_grid(grid)
        block = sample_ou_block(
            tau, config.gamma, config.master_seed, list(range(config.dump_noise))
        )
        from .noise import write_path_csv

        for sid in range(config.dump_noise):
            noise_path = os.path.join(outdir, "%s_noise_%04d.csv" % (name, sid))
            write_path_csv(NoisePath(grid=tau, values=block[sid], stream_id=sid), noise_path)
            paths["noise_%d" % sid] = noise_path

    meta_path = os.path.join(outdir, "%s_metadata.json" % name)
    write_metadata(meta_path, config, schedule, series, wall, active_backend(), __version__)
    paths["metadata"] = meta_path
    return paths


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    try:
        if args.command == "presets":
            for name, desc in list_presets(args.prefix):
                print("%-12s %s" % (name, desc))
            return 0
        config = _resolve_config(args)
        config.validate()
        outdir = args.outdir or os.path.join("runs", config.run_name)
        paths = execute_run(config, outdir)
        for kind, path in sorted(paths.items()):
            print("%s: %s" % (kind, path))
        return 0
    except _UsageError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except ConfigError as exc:
        print("config error: %s" % exc, file=sys.stderr)
        return 1
    except ValidationError as exc:
        print("validation error: %s" % exc, file=sys.stderr)
        return 2
    except NumericalFault as exc:
        print("numerical fault: %s" % exc, file=sys.stderr)
        return 3
    except OSError as exc:
        print("i/o error: %s" % exc, file=sys.stderr)
        return 4
    except TriqsdError as exc:  # pragma: no cover - safety net
        print("error: %s" % exc, file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
