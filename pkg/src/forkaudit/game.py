"""The fork security game, honest executions, and APR/FSR estimators.

A game: an honest prefix of t_fork rounds, a fork per the attacker model,
then `window` challenge rounds against both branches. The adversary wins
iff every round of both branches is accepted. Trials are seeded from
(master_seed, context tag, trial index), so estimates are bit-identical
regardless of how trials are scheduled.
"""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace

from . import statevec
from .adversary import MEMORYLESS_RANDOM, AttackerModel, branch_respond, fork
from .errors import ConfigurationError
from .protocol import (
    BasisPolicy,
    VerifierState,
    audit,
    choose_basis,
    issue_challenge,
    observe_challenge,
    run_stateless_round,
    run_temporal_round,
)
from .rng import make_rng
from .witness import init_witness

# Context tags for seed derivation; changing them invalidates reproducibility.
_STREAM_GAME = 1
_STREAM_HONEST = 2
_STREAM_STATELESS = 3

_WILSON_Z = 1.959963984540054  # two-sided 95%


@dataclass(frozen=True)
class GameConfig:
    """Full parameterization of one security-game experiment."""

    n: int = 4
    window: int = 5
    t_fork: int = 3
    shots: int = 32
    k_challenge_bits: int = 8
    tau_x: float = 0.85
    tau_z: float = 0.85
    basis_policy: BasisPolicy = field(default_factory=lambda: BasisPolicy.bernoulli(0.5))
    noise_p: float = 0.0
    attacker: AttackerModel = MEMORYLESS_RANDOM
    trials: int = 5000
    master_seed: int = 0
    independent_challenges: bool = False  # default: one challenge sent to both branches
    apr_trials: int | None = None  # honest executions backing the APR estimate

    def validate(self) -> None:
        if not 1 <= self.n <= statevec.MAX_QUBITS:
            raise ConfigurationError(
                f"n must be in 1..{statevec.MAX_QUBITS}, got {self.n}"
            )
        if self.window < 0:
            raise ConfigurationError(f"window must be >= 0, got {self.window}")
        if self.t_fork < 0:
            raise ConfigurationError(f"t_fork must be >= 0, got {self.t_fork}")
        if self.shots < 1:
            raise ConfigurationError(f"shots must be >= 1, got {self.shots}")
        if self.k_challenge_bits < 1:
            raise ConfigurationError(
                f"k_challenge_bits must be >= 1, got {self.k_challenge_bits}"
            )
        for name, tau in (("tau_x", self.tau_x), ("tau_z", self.tau_z)):
            if not 0.0 <= tau <= 1.0:
                raise ConfigurationError(f"{name} must be in [0, 1], got {tau}")
        if not 0.0 <= self.noise_p <= 1.0:
            raise ConfigurationError(f"noise_p must be in [0, 1], got {self.noise_p}")
        if self.trials < 1:
            raise ConfigurationError(f"trials must be >= 1, got {self.trials}")
        if self.apr_trials is not None and self.apr_trials < 1:
            raise ConfigurationError(
                f"apr_trials must be >= 1, got {self.apr_trials}"
            )
        if not 0.0 <= self.basis_policy.p_x <= 1.0:
            raise ConfigurationError(
                f"basis_policy p_x must be in [0, 1], got {self.basis_policy.p_x}"
            )
        self.attacker.validate()

    def digest(self) -> str:
        payload = asdict(self)
        return hashlib.sha256(
            json.dumps(payload, sort_keys=True).encode()
        ).hexdigest()[:12]


@dataclass(frozen=True)
class GameResult:
    """APR/FSR estimates for one config, with a 95% Wilson interval on FSR."""

    apr: float
    fsr: float
    fsr_ci_low: float
    fsr_ci_high: float
    trials_run: int
    wins: int

    @property
    def fsr_ci(self) -> tuple[float, float]:
        return (self.fsr_ci_low, self.fsr_ci_high)


def wilson_interval(successes: int, trials: int, z: float = _WILSON_Z) -> tuple[float, float]:
    """95% Wilson score interval; well behaved at proportions near 0 and 1."""
    if trials < 1:
        raise ConfigurationError(f"interval needs trials >= 1, got {trials}")
    p_hat = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p_hat + z2 / (2.0 * trials)) / denom
    half = z * ((p_hat * (1.0 - p_hat) / trials + z2 / (4.0 * trials * trials)) ** 0.5) / denom
    # at the boundaries the score interval is exactly [0, .] / [., 1];
    # spelling that out avoids rounding the bound past the point estimate
    low = 0.0 if successes == 0 else max(0.0, center - half)
    high = 1.0 if successes == trials else min(1.0, center + half)
    return (low, high)


def _fresh_verifier(config: GameConfig, secret: int) -> VerifierState:
    return VerifierState(
        expected_phase=secret,
        tau_x=config.tau_x,
        tau_z=config.tau_z,
        basis_policy=config.basis_policy,
        k_challenge_bits=config.k_challenge_bits,
    )


def run_security_game(config: GameConfig, trial_index: int) -> bool:
    """Play one game; True iff the adversary wins (both branches always pass)."""
    config.validate()
    rng = make_rng(config.master_seed, _STREAM_GAME, trial_index)

    secret = int(rng.integers(0, 2))
    wit = init_witness(config.n, secret)
    verifier = _fresh_verifier(config, secret)
    for _ in range(config.t_fork):
        _, wit, verifier = run_temporal_round(verifier, wit, config, rng)

    b0, b1 = fork(wit, config.t_fork, config.attacker, rng)
    v0, v1 = verifier, verifier.clone()

    for i in range(config.window):
        round_no = config.t_fork + i + 1
        ch0 = issue_challenge(v0, round_no, rng)
        if config.independent_challenges:
            ch1 = issue_challenge(v1, round_no, rng)
        else:
            ch1 = ch0
            observe_challenge(v1, ch1)
        basis0 = choose_basis(v0, rng)
        if config.independent_challenges:
            basis1 = choose_basis(v1, rng)
        else:
            basis1 = basis0
            v1.pending_basis = basis1

        ev0 = branch_respond(b0, ch0, basis0, config.shots, config.noise_p, rng)
        if not audit(v0, ev0).accepted:
            return False
        ev1 = branch_respond(b1, ch1, basis1, config.shots, config.noise_p, rng)
        if not audit(v1, ev1).accepted:
            return False
    return True


def _count_wins(config: GameConfig, start: int, stop: int) -> int:
    return sum(1 for t in range(start, stop) if run_security_game(config, t))


def _honest_counts(config: GameConfig, start: int, stop: int) -> tuple[int, int]:
    accepted = total = 0
    rounds = config.t_fork + config.window
    for trial in range(start, stop):
        rng = make_rng(config.master_seed, _STREAM_HONEST, trial)
        secret = int(rng.integers(0, 2))
        wit = init_witness(config.n, secret)
        verifier = _fresh_verifier(config, secret)
        for _ in range(rounds):
            transcript, wit, verifier = run_temporal_round(verifier, wit, config, rng)
            accepted += transcript.outcome.accepted
            total += 1
    return accepted, total


def _stateless_counts(config: GameConfig, start: int, stop: int, forked: bool) -> int:
    passed = 0
    for trial in range(start, stop):
        rng = make_rng(config.master_seed, _STREAM_STATELESS, int(forked), trial)
        _, accepted = run_stateless_round(config, rng, forked=forked)
        passed += accepted
    return passed


# below this many trials the pool startup dwarfs the work; run serial
_MIN_PARALLEL_TRIALS = 256


def _map_chunks(fn, config: GameConfig, trials: int, jobs: int | None, *args):
    """Apply fn(config, start, stop, *args) over trial chunks, optionally in parallel."""
    if jobs is None or jobs <= 1 or trials < _MIN_PARALLEL_TRIALS:
        return [fn(config, 0, trials, *args)]
    jobs = min(jobs, trials)
    bounds = [round(trials * j / jobs) for j in range(jobs + 1)]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [
            pool.submit(fn, config, bounds[j], bounds[j + 1], *args)
            for j in range(jobs)
        ]
        return [f.result() for f in futures]


def run_honest_execution(config: GameConfig, jobs: int | None = None) -> float:
    """Fraction of accepted rounds over honest executions of t_fork + window rounds."""
    config.validate()
    trials = config.apr_trials if config.apr_trials is not None else config.trials
    if config.t_fork + config.window == 0:
        return 1.0
    parts = _map_chunks(_honest_counts, config, trials, jobs)
    accepted = sum(p[0] for p in parts)
    total = sum(p[1] for p in parts)
    return accepted / total


def estimate_fsr(config: GameConfig, jobs: int | None = None) -> GameResult:
    """Monte Carlo FSR over config.trials independent games, plus the honest APR."""
    config.validate()
    wins = sum(_map_chunks(_count_wins, config, config.trials, jobs))
    low, high = wilson_interval(wins, config.trials)
    return GameResult(
        apr=run_honest_execution(config, jobs),
        fsr=wins / config.trials,
        fsr_ci_low=low,
        fsr_ci_high=high,
        trials_run=config.trials,
        wins=wins,
    )


def estimate_stateless(config: GameConfig, jobs: int | None = None) -> GameResult:
    """Stateless-baseline estimates.

    Rounds of the memory-free baseline are independent by construction, so
    the fork metric is per round: `fsr` here is the probability that one
    forked stateless round is accepted (config.trials rounds sampled), not
    a windowed product.
    """
    config.validate()
    passes = sum(_map_chunks(_stateless_counts, config, config.trials, jobs, True))
    apr_trials = config.apr_trials if config.apr_trials is not None else config.trials
    honest = sum(
        _map_chunks(
            _stateless_counts, replace(config, trials=apr_trials), apr_trials, jobs, False
        )
    )
    low, high = wilson_interval(passes, config.trials)
    return GameResult(
        apr=honest / apr_trials,
        fsr=passes / config.trials,
        fsr_ci_low=low,
        fsr_ci_high=high,
        trials_run=config.trials,
        wins=passes,
    )
