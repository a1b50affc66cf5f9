"""Verifier and prover round logic: challenges, basis choice, parity audits.

The verifier keeps a classical shadow of the witness phase (it issued the
challenges, so noise-free bookkeeping is exact) and applies thresholded
audits: X-basis shots must reproduce the expected parity, Z-basis shots
must lie on {0^n, 1^n}. Z audits never consult the phase.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from .errors import ConfigurationError, MalformedEvidenceError, ProtocolError
from .rng import RngStream
from .witness import Challenge, Evidence, WitnessState, generate_evidence, init_witness
from .witness import parity as bit_parity
from .witness import update

if TYPE_CHECKING:
    from .game import GameConfig

BASIS_X = "X"
BASIS_Z = "Z"


@dataclass(frozen=True)
class BasisPolicy:
    """How the verifier picks the audit basis each round."""

    kind: str  # "fixed-x" | "fixed-z" | "bernoulli"
    p_x: float = 0.5

    @classmethod
    def fixed_x(cls) -> "BasisPolicy":
        return cls("fixed-x", 1.0)

    @classmethod
    def fixed_z(cls) -> "BasisPolicy":
        return cls("fixed-z", 0.0)

    @classmethod
    def bernoulli(cls, p_x: float) -> "BasisPolicy":
        return cls("bernoulli", p_x)

    @classmethod
    def parse(cls, token: str) -> "BasisPolicy":
        """Parse 'fixed-x', 'fixed-z' or 'bernoulli:<p_x>'."""
        if token == "fixed-x":
            return cls.fixed_x()
        if token == "fixed-z":
            return cls.fixed_z()
        if token.startswith("bernoulli"):
            _, _, arg = token.partition(":")
            p_x = float(arg) if arg else 0.5
            if not 0.0 <= p_x <= 1.0:
                raise ConfigurationError(f"basis_policy p_x must be in [0, 1], got {p_x}")
            return cls.bernoulli(p_x)
        raise ConfigurationError(f"unknown basis_policy {token!r}")

    def token(self) -> str:
        if self.kind == "bernoulli":
            return f"bernoulli:{self.p_x:g}"
        return self.kind


@dataclass
class VerifierState:
    """Verifier-side bookkeeping for one execution branch."""

    expected_phase: int
    tau_x: float = 0.85
    tau_z: float = 0.85
    basis_policy: BasisPolicy = field(default_factory=BasisPolicy.fixed_x)
    k_challenge_bits: int = 8
    pending_basis: str | None = None

    def clone(self) -> "VerifierState":
        return VerifierState(
            expected_phase=self.expected_phase,
            tau_x=self.tau_x,
            tau_z=self.tau_z,
            basis_policy=self.basis_policy,
            k_challenge_bits=self.k_challenge_bits,
            pending_basis=self.pending_basis,
        )


@dataclass(frozen=True)
class AuditOutcome:
    basis: str
    pass_fraction: float
    accepted: bool
    round: int


@dataclass(frozen=True)
class RoundTranscript:
    round: int
    challenge: Challenge
    basis: str
    evidence: Evidence
    outcome: AuditOutcome


def observe_challenge(verifier: VerifierState, challenge: Challenge) -> None:
    """Fold a challenge the verifier issued into its expected phase."""
    verifier.expected_phase ^= bit_parity(challenge.bits)


def issue_challenge(verifier: VerifierState, round: int, rng: RngStream) -> Challenge:
    """Draw k uniform challenge bits and track their parity in the shadow phase."""
    if round < 1:
        raise ProtocolError(f"rounds are 1-indexed, got {round}")
    bits = "".join("01"[b] for b in rng.integers(0, 2, size=verifier.k_challenge_bits))
    challenge = Challenge(bits=bits, round=round)
    observe_challenge(verifier, challenge)
    return challenge


def choose_basis(verifier: VerifierState, rng: RngStream) -> str:
    """Pick the audit basis per policy and remember it for the audit step."""
    policy = verifier.basis_policy
    if policy.kind == "fixed-x":
        basis = BASIS_X
    elif policy.kind == "fixed-z":
        basis = BASIS_Z
    else:
        basis = BASIS_X if rng.random() < policy.p_x else BASIS_Z
    verifier.pending_basis = basis
    return basis


def audit(verifier: VerifierState, evidence: Evidence) -> AuditOutcome:
    """Thresholded consistency check of one round of evidence."""
    if not evidence.shots:
        raise MalformedEvidenceError("evidence carries no shots")
    if verifier.pending_basis is not None and evidence.basis != verifier.pending_basis:
        raise ProtocolError(
            f"evidence basis {evidence.basis} does not match requested "
            f"basis {verifier.pending_basis}"
        )
    verifier.pending_basis = None
    shots = evidence.shots
    if evidence.basis == BASIS_X:
        good = sum(1 for s in shots if bit_parity(s) == verifier.expected_phase)
        threshold = verifier.tau_x
    elif evidence.basis == BASIS_Z:
        n = len(shots[0])
        zeros, ones = "0" * n, "1" * n
        good = sum(1 for s in shots if s == zeros or s == ones)
        threshold = verifier.tau_z
    else:
        raise MalformedEvidenceError(f"unknown evidence basis {evidence.basis!r}")
    pass_fraction = good / len(shots)
    return AuditOutcome(
        basis=evidence.basis,
        pass_fraction=pass_fraction,
        accepted=pass_fraction >= threshold,
        round=evidence.round,
    )


def run_temporal_round(
    verifier: VerifierState,
    witness: WitnessState,
    config: "GameConfig",
    rng: RngStream,
) -> tuple[RoundTranscript, WitnessState, VerifierState]:
    """One stateful round: challenge, witness update, evidence, audit."""
    round_no = witness.rounds_elapsed + 1
    challenge = issue_challenge(verifier, round_no, rng)
    witness = update(witness, challenge)
    basis = choose_basis(verifier, rng)
    evidence = generate_evidence(witness, basis, config.shots, config.noise_p, rng)
    outcome = audit(verifier, evidence)
    transcript = RoundTranscript(
        round=round_no,
        challenge=challenge,
        basis=basis,
        evidence=evidence,
        outcome=outcome,
    )
    return transcript, witness, verifier


def run_stateless_round(
    config: "GameConfig",
    rng: RngStream,
    forked: bool = False,
) -> tuple[RoundTranscript, bool]:
    """One round of the memory-free baseline.

    A fresh secret phase is drawn for this round only and delivered solely
    via the quantum state. The honest prover holds that state and passes;
    a forked branch (`forked=True`) does not, so it answers from a uniform
    phase guess combined with the challenge it observed.
    """
    from .witness import ghz_shot_bitstrings  # local to avoid cycle at import

    secret = int(rng.integers(0, 2))
    verifier = VerifierState(
        expected_phase=secret,
        tau_x=config.tau_x,
        tau_z=config.tau_z,
        basis_policy=config.basis_policy,
        k_challenge_bits=config.k_challenge_bits,
    )
    challenge = issue_challenge(verifier, 1, rng)
    basis = choose_basis(verifier, rng)
    if forked:
        guessed = int(rng.integers(0, 2)) ^ bit_parity(challenge.bits)
        evidence = Evidence(
            basis=basis,
            shots=ghz_shot_bitstrings(
                config.n, guessed, basis, config.shots, config.noise_p, rng
            ),
            round=1,
        )
    else:
        prover = update(init_witness(config.n, secret), challenge)
        evidence = generate_evidence(prover, basis, config.shots, config.noise_p, rng)
    outcome = audit(verifier, evidence)
    transcript = RoundTranscript(
        round=1, challenge=challenge, basis=basis, evidence=evidence, outcome=outcome
    )
    return transcript, outcome.accepted
