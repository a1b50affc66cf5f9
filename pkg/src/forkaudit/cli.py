"""Command-line entry point: single runs, sweeps, the figure suite, decay fits.

Configuration comes from an optional flat key=value file plus flags (flags
win). Every command prints the master seed in use; rerunning with
--seed <that value> reproduces all outputs byte-for-byte.

Exit codes: 0 success, 1 runtime/statistical failure, 2 configuration error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import secrets
import sys
from pathlib import Path

from .adversary import AttackerModel
from .errors import ConfigurationError, FitUnavailableError
from .experiments import (
    ATTACKER_K_VALUES,
    AXIS_FIELDS,
    N_VALUES,
    NOISE_VALUES,
    SHOT_VALUES,
    TAU_X_VALUES,
    TEMPORAL,
    WINDOW_VALUES,
    SweepSpec,
    fit_decay,
    read_rows,
    run_figure_suite,
    sweep,
    write_rows,
)
from .game import GameConfig, estimate_fsr
from .protocol import BasisPolicy

log = logging.getLogger("forkaudit")

OUTPUT_DIR_ENV = "FORKAUDIT_OUTPUT_DIR"

_DEFAULT_AXIS_VALUES = {
    "W": WINDOW_VALUES,
    "noise_p": NOISE_VALUES,
    "n": N_VALUES,
    "shots": SHOT_VALUES,
    "tau_x": TAU_X_VALUES,
    "attacker_k": ATTACKER_K_VALUES,
}

# config-file keys -> coercion
_INT_KEYS = {
    "n", "window", "t_fork", "shots", "k_challenge_bits", "trials",
    "apr_trials", "master_seed", "attacker_k", "fixed_phase",
}
_FLOAT_KEYS = {"tau_x", "tau_z", "noise_p"}
_STR_KEYS = {"attacker", "basis_policy"}
_BOOL_KEYS = {"independent_challenges"}


def _parse_config_file(path: str) -> dict:
    """Read `key = value` lines; '#' starts a comment; unknown keys are errors."""
    file = Path(path)
    if not file.is_file():
        raise FileNotFoundError(f"config file not found: {file}")
    values: dict = {}
    for lineno, raw in enumerate(file.read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigurationError(f"{file}:{lineno}: expected 'key = value', got {raw!r}")
        key, _, value = (part.strip() for part in line.partition("="))
        try:
            if key in _INT_KEYS:
                values[key] = int(value)
            elif key in _FLOAT_KEYS:
                values[key] = float(value)
            elif key in _BOOL_KEYS:
                if value.lower() not in ("true", "false", "0", "1"):
                    raise ValueError(value)
                values[key] = value.lower() in ("true", "1")
            elif key in _STR_KEYS:
                values[key] = value
            else:
                raise ConfigurationError(f"{file}:{lineno}: unknown config key {key!r}")
        except ValueError as exc:
            raise ConfigurationError(
                f"{file}:{lineno}: bad value for {key}: {value!r}"
            ) from exc
    return values


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key = value config file")
    parser.add_argument("--n", type=int, help="qubit count")
    parser.add_argument("--window", type=int, help="audit window (post-fork rounds)")
    parser.add_argument("--t-fork", type=int, dest="t_fork", help="fork round")
    parser.add_argument("--shots", type=int, help="measurement shots per round")
    parser.add_argument(
        "--k-challenge-bits", type=int, dest="k_challenge_bits",
        help="challenge width in bits",
    )
    parser.add_argument("--tau-x", type=float, dest="tau_x", help="X-audit threshold")
    parser.add_argument("--tau-z", type=float, dest="tau_z", help="Z-audit threshold")
    parser.add_argument(
        "--basis", dest="basis_policy",
        help="fixed-x | fixed-z | bernoulli:<p_x>",
    )
    parser.add_argument("--noise-p", type=float, dest="noise_p", help="depolarizing p")
    parser.add_argument(
        "--attacker",
        help="memoryless | memoryless-fixed | product-state | limited-memory | ideal-coherent",
    )
    parser.add_argument(
        "--attacker-k", type=int, dest="attacker_k",
        help="coherence horizon for limited-memory",
    )
    parser.add_argument(
        "--fixed-phase", type=int, dest="fixed_phase", choices=(0, 1),
        help="base guess for memoryless-fixed",
    )
    parser.add_argument("--trials", type=int, help="Monte Carlo game trials")
    parser.add_argument(
        "--apr-trials", type=int, dest="apr_trials",
        help="honest executions backing the APR estimate",
    )
    parser.add_argument(
        "--independent-challenges", action="store_true", default=None,
        dest="independent_challenges",
        help="issue separate challenges per branch instead of one shared challenge",
    )
    parser.add_argument("--seed", type=int, help="master seed (default: random, printed)")
    parser.add_argument(
        "--jobs", type=int, default=os.cpu_count(),
        help="parallel workers (default: all cores; 1 forces serial)",
    )


def _build_config(args: argparse.Namespace) -> GameConfig:
    values: dict = {}
    if args.config:
        values.update(_parse_config_file(args.config))
    for key in (
        "n", "window", "t_fork", "shots", "k_challenge_bits", "tau_x", "tau_z",
        "basis_policy", "noise_p", "attacker", "attacker_k", "fixed_phase",
        "trials", "apr_trials", "independent_challenges",
    ):
        flag = getattr(args, key, None)
        if flag is not None:
            values[key] = flag
    if args.seed is not None:
        values["master_seed"] = args.seed
    if "master_seed" not in values:
        values["master_seed"] = secrets.randbelow(2**32)

    attacker_token = values.pop("attacker", None)
    attacker_k = values.pop("attacker_k", 1)
    fixed_phase = values.pop("fixed_phase", 0)
    basis_token = values.pop("basis_policy", None)

    kwargs = dict(values)
    if attacker_token is not None:
        kwargs["attacker"] = AttackerModel.parse(
            attacker_token, k=attacker_k, fixed_phase=fixed_phase
        )
    if basis_token is not None:
        kwargs["basis_policy"] = BasisPolicy.parse(basis_token)
    try:
        config = GameConfig(**kwargs)
    except TypeError as exc:
        raise ConfigurationError(str(exc)) from exc
    config.validate()
    return config


def _output_dir(args: argparse.Namespace) -> Path:
    if args.out:
        return Path(args.out)
    return Path(os.environ.get(OUTPUT_DIR_ENV, "results"))


def _cmd_run(args: argparse.Namespace) -> int:
    config = _build_config(args)
    print(f"master_seed = {config.master_seed}")
    result = estimate_fsr(config, jobs=args.jobs)
    print(f"attacker     : {config.attacker.label()}")
    print(f"basis_policy : {config.basis_policy.token()}")
    print(f"window       : {config.window}")
    print(f"apr          : {result.apr:.6f}")
    print(f"fsr          : {result.fsr:.6f}")
    print(f"fsr_ci_95    : [{result.fsr_ci_low:.6f}, {result.fsr_ci_high:.6f}]")
    print(f"trials       : {result.trials_run} ({result.wins} adversary wins)")
    if args.json:
        payload = dataclasses.asdict(result)
        payload["config"] = dataclasses.asdict(config)
        Path(args.json).write_text(
            json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        print(f"wrote {args.json}")
    return 0


def _parse_values(axis: str, raw: str | None):
    if raw is None:
        return _DEFAULT_AXIS_VALUES[axis]
    caster = float if axis in ("noise_p", "tau_x") else int
    try:
        return tuple(caster(part) for part in raw.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigurationError(f"bad --values for axis {axis}: {raw!r}") from exc


def _cmd_sweep(args: argparse.Namespace) -> int:
    config = _build_config(args)
    print(f"master_seed = {config.master_seed}")
    protocols = tuple(p.strip() for p in args.protocols.split(",") if p.strip())
    attackers = tuple(
        AttackerModel.parse(tok.strip(), k=args.attacker_k or 1)
        for tok in args.attackers.split(",")
        if tok.strip()
    ) if args.attackers else ()
    spec = SweepSpec(
        base=config,
        axis=args.axis,
        values=_parse_values(args.axis, args.values),
        protocols=protocols,
        attackers=attackers,
    )
    rows = sweep(spec, jobs=args.jobs)
    out_dir = _output_dir(args)
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / f"sweep_{args.axis}.csv"
    write_rows(path, rows)
    print(f"wrote {path} ({len(rows)} rows)")
    return 0


def _cmd_figures(args: argparse.Namespace) -> int:
    config = _build_config(args)
    print(f"master_seed = {config.master_seed}")
    out_dir = _output_dir(args)
    summary = run_figure_suite(out_dir, base=config, jobs=args.jobs)
    print(f"wrote figure CSVs and summary.json to {out_dir}")
    for name, entry in sorted(summary.items()):
        slope = entry.get("slope")
        if slope is not None:
            print(
                f"{name}: slope={slope:.4f} intercept={entry['intercept']:.4f} "
                f"r_squared={entry['r_squared']:.4f}"
            )
    return 0


def _cmd_fit(args: argparse.Namespace) -> int:
    path = Path(args.csv)
    if not path.is_file():
        raise FileNotFoundError(f"CSV file not found: {path}")
    rows = read_rows(path)
    if args.attacker:
        rows = [r for r in rows if r.attacker == args.attacker]
    if args.protocol:
        rows = [r for r in rows if r.protocol == args.protocol]
    fit = fit_decay(rows)
    print(f"slope     = {fit.slope:.6f}")
    print(f"intercept = {fit.intercept:.6f}")
    print(f"r_squared = {fit.r_squared:.6f}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="forkaudit",
        description="Fork-attack security games on a GHZ-parity continuity protocol.",
    )
    parser.add_argument(
        "-v", "--verbose", action="count", default=0,
        help="-v for info, -vv for debug logging",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="one FSR/APR estimate for a single config")
    _add_config_flags(p_run)
    p_run.add_argument("--json", help="also write the result as JSON to this path")
    p_run.set_defaults(fn=_cmd_run)

    p_sweep = sub.add_parser("sweep", help="sweep one axis and write a CSV")
    _add_config_flags(p_sweep)
    p_sweep.add_argument(
        "--axis", required=True, choices=sorted(AXIS_FIELDS),
        help="sweep axis",
    )
    p_sweep.add_argument("--values", help="comma-separated axis values (default: standard grid)")
    p_sweep.add_argument(
        "--protocols", default=TEMPORAL,
        help="comma list of temporal,stateless (default temporal)",
    )
    p_sweep.add_argument("--attackers", help="comma list of attacker tokens")
    p_sweep.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV} or results/)")
    p_sweep.set_defaults(fn=_cmd_sweep)

    p_fig = sub.add_parser("figures", help="run the full figure suite")
    _add_config_flags(p_fig)
    p_fig.add_argument("--out", help=f"output directory (default ${OUTPUT_DIR_ENV} or results/)")
    p_fig.set_defaults(fn=_cmd_figures)

    p_fit = sub.add_parser("fit", help="decay fit of log2(fsr) vs W from a sweep CSV")
    p_fit.add_argument("csv", help="CSV produced by sweep/figures")
    p_fit.add_argument("--attacker", help="restrict to one attacker label")
    p_fit.add_argument("--protocol", help="restrict to one protocol label")
    p_fit.set_defaults(fn=_cmd_fit)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    level = logging.WARNING - 10 * min(args.verbose, 2)
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.fn(args)
    except (ConfigurationError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except FitUnavailableError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # runtime failures -> exit 1
        log.debug("unhandled failure", exc_info=True)
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
