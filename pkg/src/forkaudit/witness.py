"""The stateful continuity witness: phase bookkeeping and evidence shots.

The witness tracks one secret phase bit. Odd-parity challenges flip it;
evidence re-prepares a GHZ state carrying the current phase for every shot
(the phase bit is the protected continuity secret, never sent classically).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import statevec
from .errors import ConfigurationError, ProtocolError
from .rng import RngStream


@dataclass(frozen=True)
class WitnessState:
    """Witness after `rounds_elapsed` challenge updates; phase 0 = GHZ+, 1 = GHZ-."""

    n: int
    phase: int
    rounds_elapsed: int


@dataclass(frozen=True)
class Challenge:
    """Verifier challenge bits for one round (rounds are 1-indexed)."""

    bits: str
    round: int


@dataclass(frozen=True)
class Evidence:
    """Measured shot transcript for one round; each shot is an n-bit string."""

    basis: str
    shots: tuple[str, ...]
    round: int


def parity(bits: str) -> int:
    """XOR of all bits in a '0'/'1' string."""
    return bits.count("1") & 1


def init_witness(n: int, secret_phase: int) -> WitnessState:
    if secret_phase not in (0, 1):
        raise ConfigurationError(f"secret phase must be 0 or 1, got {secret_phase}")
    statevec.ghz_amplitudes(n, secret_phase)  # range-checks n
    return WitnessState(n=n, phase=secret_phase, rounds_elapsed=0)


def update(witness: WitnessState, challenge: Challenge) -> WitnessState:
    """Apply one challenge: odd parity flips the phase; the round counter advances."""
    if challenge.round != witness.rounds_elapsed + 1:
        raise ProtocolError(
            f"challenge for round {challenge.round} applied to witness at "
            f"round {witness.rounds_elapsed}"
        )
    return WitnessState(
        n=witness.n,
        phase=witness.phase ^ parity(challenge.bits),
        rounds_elapsed=witness.rounds_elapsed + 1,
    )


def ghz_shot_bitstrings(
    n: int,
    phase: int,
    basis: str,
    shots: int,
    noise_p: float,
    rng: RngStream,
) -> tuple[str, ...]:
    """Shot outcomes from re-prepared GHZ(n, phase) states under trajectory noise."""
    indices = statevec.sample_shots(
        statevec.ghz_amplitudes(n, phase), basis, shots, noise_p, rng
    )
    return tuple(statevec.index_to_bitstring(int(i), n) for i in indices)


def generate_evidence(
    witness: WitnessState,
    basis: str,
    shots: int,
    noise_p: float,
    rng: RngStream,
) -> Evidence:
    """Produce one round of evidence from the witness's current phase.

    Per shot: prepare GHZ(n), flip to GHZ- if the phase bit is set, apply one
    depolarizing trajectory, measure all qubits in the requested basis.
    """
    if shots < 1:
        raise ConfigurationError(f"shots must be >= 1, got {shots}")
    return Evidence(
        basis=basis,
        shots=ghz_shot_bitstrings(witness.n, witness.phase, basis, shots, noise_p, rng),
        round=witness.rounds_elapsed,
    )


def product_state_shots(
    n: int, basis: str, shots: int, noise_p: float, rng: RngStream
) -> tuple[str, ...]:
    """Shot outcomes from |0...0> (no entanglement), for separable attackers."""
    base = np.zeros(1 << n)
    base[0] = 1.0
    indices = statevec.sample_shots(base, basis, shots, noise_p, rng)
    return tuple(statevec.index_to_bitstring(int(i), n) for i in indices)
