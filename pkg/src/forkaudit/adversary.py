"""Fork orchestration and the attacker models answering on the forked branch.

Branch B0 keeps the true witness. B1 gets whatever the attacker model can
carry across the fork: nothing but classical observation for memoryless and
limited-memory attackers (their code paths never see the true phase), or a
perfect state copy for the physics-violating ideal-coherent upper bound.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

from .errors import ConfigurationError
from .rng import RngStream
from .witness import (
    Challenge,
    Evidence,
    WitnessState,
    generate_evidence,
    ghz_shot_bitstrings,
    parity,
    product_state_shots,
    update,
)

MEMORYLESS = "memoryless"
LIMITED_MEMORY = "limited-memory"
IDEAL_COHERENT = "ideal-coherent"

RANDOM_PHASE = "random-phase"
FIXED_PHASE = "fixed-phase"
PRODUCT_STATE = "product-state"


@dataclass(frozen=True)
class AttackerModel:
    """One of: memoryless (three strategies), limited-memory(k), ideal-coherent."""

    kind: str
    strategy: str = RANDOM_PHASE  # memoryless only
    fixed_phase: int = 0
    k: int = 1  # limited-memory coherence horizon, in rounds

    def validate(self) -> None:
        if self.kind not in (MEMORYLESS, LIMITED_MEMORY, IDEAL_COHERENT):
            raise ConfigurationError(f"unknown attacker kind {self.kind!r}")
        if self.kind == MEMORYLESS and self.strategy not in (
            RANDOM_PHASE,
            FIXED_PHASE,
            PRODUCT_STATE,
        ):
            raise ConfigurationError(f"unknown memoryless strategy {self.strategy!r}")
        if self.kind == LIMITED_MEMORY and self.k < 1:
            raise ConfigurationError(f"limited-memory k must be >= 1, got {self.k}")
        if self.fixed_phase not in (0, 1):
            raise ConfigurationError(f"fixed_phase must be 0 or 1, got {self.fixed_phase}")

    def label(self) -> str:
        if self.kind == MEMORYLESS:
            if self.strategy == FIXED_PHASE:
                return f"memoryless-fixed-{self.fixed_phase}"
            if self.strategy == PRODUCT_STATE:
                return "product-state"
            return "memoryless"
        if self.kind == LIMITED_MEMORY:
            return f"limited-k{self.k}"
        return "ideal-coherent"

    @classmethod
    def parse(cls, token: str, k: int = 1, fixed_phase: int = 0) -> "AttackerModel":
        """Parse a CLI token; `k`/`fixed_phase` fill in model parameters."""
        if token == "memoryless":
            return cls(MEMORYLESS, RANDOM_PHASE)
        if token == "memoryless-fixed":
            return cls(MEMORYLESS, FIXED_PHASE, fixed_phase=fixed_phase)
        if token == "product-state":
            return cls(MEMORYLESS, PRODUCT_STATE)
        if token == "limited-memory":
            return cls(LIMITED_MEMORY, k=k)
        if token == "ideal-coherent":
            return cls(IDEAL_COHERENT)
        raise ConfigurationError(f"unknown attacker {token!r}")


MEMORYLESS_RANDOM = AttackerModel(MEMORYLESS, RANDOM_PHASE)


@dataclass
class SimulatedWitness:
    """Classical stand-in for the witness on a branch without the real state."""

    model: AttackerModel
    n: int
    phase_estimate: int
    rounds_since_refresh: int = 0


@dataclass
class ForkBranch:
    """One post-fork execution branch; exactly one branch holds the true witness."""

    branch_id: str
    witness: WitnessState | None = None
    sim: SimulatedWitness | None = None


def fork(
    witness: WitnessState,
    t_fork: int,
    model: AttackerModel,
    rng: RngStream,
) -> tuple[ForkBranch, ForkBranch]:
    """Split the execution at round t_fork into B0 (true witness) and B1."""
    model.validate()
    if not 0 <= t_fork <= witness.rounds_elapsed:
        raise ConfigurationError(
            f"t_fork must be in 0..{witness.rounds_elapsed} "
            f"(rounds elapsed), got {t_fork}"
        )
    b0 = ForkBranch("B0", witness=witness)
    if model.kind == IDEAL_COHERENT:
        # Exact state copy, including the secret phase: the upper bound an
        # adversary bound by physics could never reach.
        b1 = ForkBranch("B1", witness=replace(witness))
    else:
        b1 = ForkBranch(
            "B1",
            sim=SimulatedWitness(
                model=model, n=witness.n, phase_estimate=int(rng.integers(0, 2))
            ),
        )
    return b0, b1


def _simulated_phase(sim: SimulatedWitness, challenge: Challenge, rng: RngStream) -> int:
    """Advance the classical phase estimate for one observed challenge."""
    model = sim.model
    if model.kind == MEMORYLESS:
        base = (
            int(rng.integers(0, 2))
            if model.strategy == RANDOM_PHASE
            else model.fixed_phase
        )
        return base ^ parity(challenge.bits)
    # limited-memory: re-guess every k rounds, track parities in between
    if sim.rounds_since_refresh == model.k:
        sim.phase_estimate = int(rng.integers(0, 2))
        sim.rounds_since_refresh = 0
    sim.phase_estimate ^= parity(challenge.bits)
    sim.rounds_since_refresh += 1
    return sim.phase_estimate


def branch_respond(
    branch: ForkBranch,
    challenge: Challenge,
    basis: str,
    shots: int,
    noise_p: float,
    rng: RngStream,
) -> Evidence:
    """Answer one challenge on a branch, honestly or from the simulated state."""
    if branch.witness is not None:
        branch.witness = update(branch.witness, challenge)
        return generate_evidence(branch.witness, basis, shots, noise_p, rng)
    sim = branch.sim
    assert sim is not None
    if sim.model.kind == MEMORYLESS and sim.model.strategy == PRODUCT_STATE:
        bitstrings = product_state_shots(sim.n, basis, shots, noise_p, rng)
    else:
        phase = _simulated_phase(sim, challenge, rng)
        bitstrings = ghz_shot_bitstrings(sim.n, phase, basis, shots, noise_p, rng)
    return Evidence(basis=basis, shots=bitstrings, round=challenge.round)
