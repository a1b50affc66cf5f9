"""Parameter-sweep harness, the exponential decay fit, and the figure suite.

CSV schema (one row per sweep cell, header included, UTF-8, '.' decimals):

    axis,axis_value,protocol,attacker,apr,fsr,fsr_ci_low,fsr_ci_high,trials,seed

The figure suite reproduces one CSV per figure analog and a JSON summary
holding the decay fits. All cell seeds derive from one master seed, so a
rerun with the same seed is byte-identical.
"""

from __future__ import annotations

import csv
import json
import logging
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .adversary import AttackerModel
from .errors import ConfigurationError, FitUnavailableError
from .game import GameConfig, estimate_fsr, estimate_stateless
from .protocol import BasisPolicy
from .rng import derive_seed

log = logging.getLogger(__name__)

TEMPORAL = "temporal"
STATELESS = "stateless"

_STREAM_SWEEP = 4

# Sweep axes and the GameConfig field each one drives. attacker_k swaps the
# attacker model instead of a plain field.
AXIS_FIELDS = {
    "W": "window",
    "noise_p": "noise_p",
    "n": "n",
    "shots": "shots",
    "tau_x": "tau_x",
    "attacker_k": None,
}

CSV_HEADER = [
    "axis",
    "axis_value",
    "protocol",
    "attacker",
    "apr",
    "fsr",
    "fsr_ci_low",
    "fsr_ci_high",
    "trials",
    "seed",
]


@dataclass(frozen=True)
class SweepSpec:
    """One sweep: an axis, its values, and the protocol/attacker grid."""

    base: GameConfig
    axis: str
    values: tuple
    protocols: tuple[str, ...] = (TEMPORAL,)
    attackers: tuple[AttackerModel, ...] = ()

    def validate(self) -> None:
        if self.axis not in AXIS_FIELDS:
            raise ConfigurationError(
                f"unknown sweep axis {self.axis!r}; expected one of {sorted(AXIS_FIELDS)}"
            )
        if not self.values:
            raise ConfigurationError("sweep values must be non-empty")
        if list(self.values) != sorted(self.values):
            raise ConfigurationError("sweep values must be strictly ordered")
        if len(set(self.values)) != len(self.values):
            raise ConfigurationError("sweep values must be distinct")
        for protocol in self.protocols:
            if protocol not in (TEMPORAL, STATELESS):
                raise ConfigurationError(f"unknown protocol {protocol!r}")


@dataclass(frozen=True)
class SweepRow:
    axis: str
    axis_value: float
    protocol: str
    attacker: str
    apr: float
    fsr: float
    fsr_ci_low: float
    fsr_ci_high: float
    trials: int
    seed: int


@dataclass(frozen=True)
class DecayFit:
    """Least squares of log2(fsr) against the window length."""

    slope: float
    intercept: float
    r_squared: float


def _cell_config(
    spec: SweepSpec, value, attacker: AttackerModel, context: int, cell_index: int
) -> GameConfig:
    seed = derive_seed(spec.base.master_seed, _STREAM_SWEEP, context, cell_index)
    field_name = AXIS_FIELDS[spec.axis]
    if spec.axis == "attacker_k":
        attacker = AttackerModel.parse("limited-memory", k=int(value))
        cfg = replace(spec.base, attacker=attacker, master_seed=seed)
    else:
        cfg = replace(
            spec.base, **{field_name: value}, attacker=attacker, master_seed=seed
        )
    return cfg


def sweep(
    spec: SweepSpec, jobs: int | None = None, seed_context: int = 0
) -> list[SweepRow]:
    """Run every (value x protocol x attacker) cell; bad cells warn and are skipped.

    `seed_context` separates the cell-seed streams of sweeps that share one
    master seed (the figure suite passes a distinct context per experiment).
    """
    spec.validate()
    attackers = spec.attackers or (spec.base.attacker,)
    rows: list[SweepRow] = []
    cell_index = 0
    for value in spec.values:
        for protocol in spec.protocols:
            for attacker in attackers:
                cfg = _cell_config(spec, value, attacker, seed_context, cell_index)
                cell_index += 1
                try:
                    cfg.validate()
                    if protocol == TEMPORAL:
                        res = estimate_fsr(cfg, jobs)
                    else:
                        res = estimate_stateless(cfg, jobs)
                except ConfigurationError as exc:
                    log.warning(
                        "skipping sweep cell %s=%r protocol=%s attacker=%s: %s",
                        spec.axis, value, protocol, cfg.attacker.label(), exc,
                    )
                    continue
                rows.append(
                    SweepRow(
                        axis=spec.axis,
                        axis_value=value,
                        protocol=protocol,
                        attacker=cfg.attacker.label(),
                        apr=res.apr,
                        fsr=res.fsr,
                        fsr_ci_low=res.fsr_ci_low,
                        fsr_ci_high=res.fsr_ci_high,
                        trials=res.trials_run,
                        seed=cfg.master_seed,
                    )
                )
    return rows


def fit_decay(rows: list[SweepRow]) -> DecayFit:
    """OLS of log2(fsr) vs W over rows with fsr > 0 (zeros carry no log signal)."""
    points = [(row.axis_value, row.fsr) for row in rows if row.fsr > 0.0]
    if len(points) < 3:
        raise FitUnavailableError(len(points))
    x = np.array([p[0] for p in points], dtype=float)
    y = np.log2([p[1] for p in points])
    slope, intercept = np.polyfit(x, y, 1)
    residuals = y - (slope * x + intercept)
    ss_res = float(np.sum(residuals**2))
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    if ss_tot == 0.0:
        r_squared = 1.0 if ss_res < 1e-12 else 0.0
    else:
        r_squared = 1.0 - ss_res / ss_tot
    return DecayFit(slope=float(slope), intercept=float(intercept), r_squared=r_squared)


def write_rows(path: Path, rows: list[SweepRow]) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            writer.writerow(
                [
                    row.axis,
                    row.axis_value,
                    row.protocol,
                    row.attacker,
                    row.apr,
                    row.fsr,
                    row.fsr_ci_low,
                    row.fsr_ci_high,
                    row.trials,
                    row.seed,
                ]
            )


def read_rows(path: Path) -> list[SweepRow]:
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        for rec in csv.DictReader(fh):
            rows.append(
                SweepRow(
                    axis=rec["axis"],
                    axis_value=float(rec["axis_value"]),
                    protocol=rec["protocol"],
                    attacker=rec["attacker"],
                    apr=float(rec["apr"]),
                    fsr=float(rec["fsr"]),
                    fsr_ci_low=float(rec["fsr_ci_low"]),
                    fsr_ci_high=float(rec["fsr_ci_high"]),
                    trials=int(rec["trials"]),
                    seed=int(rec["seed"]),
                )
            )
    return rows


# ---------------------------------------------------------------------------
# Figure suite

WINDOW_VALUES = tuple(range(1, 13))
NOISE_VALUES = (0.0, 0.01, 0.02, 0.05, 0.1, 0.2)
N_VALUES = (2, 3, 4, 6, 8)
SHOT_VALUES = (1, 4, 16, 32, 128, 512)
TAU_X_VALUES = (0.55, 0.65, 0.75, 0.85, 0.95)
ATTACKER_K_VALUES = (1, 2, 4, 8, 16)

# The eight figure analogs. Names double as CSV stems; `fit` marks the window
# experiments whose decay fit lands in the summary. window_mixed_basis is a
# ninth, supplementary output: the same decay sweep under the random-basis
# policy, whose reference law is (3/4)^W instead of 2^-W.
FIGURE_CSVS = (
    "attacker_k",
    "n_qubits",
    "shots",
    "tau_x",
    "window_fixed_x",
    "window_models",
    "noise_protocols",
    "noise_models",
)
SUPPLEMENTARY_CSVS = ("window_mixed_basis",)


def _figure_specs(base: GameConfig) -> dict[str, SweepSpec]:
    fixed_x = replace(base, basis_policy=BasisPolicy.fixed_x())
    memoryless = AttackerModel.parse("memoryless")
    window_attackers = (
        memoryless,
        AttackerModel.parse("limited-memory", k=2),
        AttackerModel.parse("limited-memory", k=4),
        AttackerModel.parse("ideal-coherent"),
    )
    noise_attackers = (
        memoryless,
        AttackerModel.parse("limited-memory", k=4),
        AttackerModel.parse("ideal-coherent"),
    )
    return {
        "attacker_k": SweepSpec(
            base=replace(fixed_x, window=8),
            axis="attacker_k",
            values=ATTACKER_K_VALUES,
        ),
        "n_qubits": SweepSpec(
            base=base,
            axis="n",
            values=N_VALUES,
            protocols=(TEMPORAL, STATELESS),
            attackers=(memoryless,),
        ),
        "shots": SweepSpec(base=base, axis="shots", values=SHOT_VALUES),
        "tau_x": SweepSpec(
            # a small noise floor makes the acceptance/suppression tradeoff visible
            base=replace(base, noise_p=0.05),
            axis="tau_x",
            values=TAU_X_VALUES,
        ),
        "window_fixed_x": SweepSpec(
            base=fixed_x, axis="W", values=WINDOW_VALUES, attackers=(memoryless,)
        ),
        "window_mixed_basis": SweepSpec(
            base=base, axis="W", values=WINDOW_VALUES, attackers=(memoryless,)
        ),
        "window_models": SweepSpec(
            base=fixed_x, axis="W", values=WINDOW_VALUES, attackers=window_attackers
        ),
        "noise_protocols": SweepSpec(
            base=base,
            axis="noise_p",
            values=NOISE_VALUES,
            protocols=(TEMPORAL, STATELESS),
            attackers=(memoryless,),
        ),
        "noise_models": SweepSpec(
            base=base, axis="noise_p", values=NOISE_VALUES, attackers=noise_attackers
        ),
    }


def run_figure_suite(
    output_dir: str | Path,
    base: GameConfig | None = None,
    jobs: int | None = None,
) -> dict:
    """Run every figure sweep, write the CSVs and summary.json; returns the summary."""
    out = Path(output_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    base = base if base is not None else GameConfig()
    summary: dict[str, dict] = {}
    for index, (name, spec) in enumerate(_figure_specs(base).items()):
        rows = sweep(spec, jobs, seed_context=index)
        path = out / f"{name}.csv"
        try:
            write_rows(path, rows)
        except OSError as exc:
            raise OSError(f"cannot write {path}: {exc}") from exc
        log.info("wrote %s (%d rows)", path, len(rows))
        if spec.axis == "W" and len(spec.attackers) == 1:
            entry: dict = {"config_digest": spec.base.digest()}
            try:
                fit = fit_decay(rows)
                entry.update(
                    slope=fit.slope, intercept=fit.intercept, r_squared=fit.r_squared
                )
            except FitUnavailableError as exc:
                log.warning("no decay fit for %s: %s", name, exc)
                entry.update(slope=None, intercept=None, r_squared=None)
            summary[name] = entry
    summary_path = out / "summary.json"
    with open(summary_path, "w", encoding="utf-8") as fh:
        json.dump(summary, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return summary
