"""Minimal dense statevector simulator for GHZ-parity protocols.

Conventions: bit i of a basis-state index is qubit i (qubit 0 = least
significant bit). Outcomes are rendered as bitstrings in standard binary
order, i.e. character 0 is qubit n-1 and the last character is qubit 0,
matching ket notation |q_{n-1} ... q_0>.

Measurement never collapses: every shot in this artifact re-prepares its
state, so sampling reads |a|^2 off a working copy.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError, InternalInvariantError
from .rng import RngStream

MAX_QUBITS = 24

_SQRT1_2 = 1.0 / np.sqrt(2.0)
_NORM_TOL = 1e-10
_SAMPLE_NORM_TOL = 1e-6

# Dense H^{(x)n} matrices pay off up to this size; beyond it an in-place
# butterfly transform avoids the 4^n memory.
_MAX_DENSE_HADAMARD = 10

_PAULI_AXES = ("X", "Y", "Z")

_hadamard_cache: dict[int, np.ndarray] = {}
_bitstring_cache: dict[int, list[str]] = {}
_parity_cache: dict[int, np.ndarray] = {}


@dataclass
class StateVector:
    """Pure n-qubit state as a dense complex amplitude vector of length 2^n."""

    n_qubits: int
    amplitudes: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << self.n_qubits

    def norm_sq(self) -> float:
        a = self.amplitudes
        return float(np.real(np.vdot(a, a)))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


@dataclass(frozen=True)
class PauliError:
    """A single-qubit Pauli error: axis in {X, Y, Z} on one qubit."""

    axis: str
    qubit: int


def _check_qubit_count(n: int) -> None:
    if not 1 <= n <= MAX_QUBITS:
        raise ConfigurationError(
            f"qubit count must be in 1..{MAX_QUBITS}, got {n}"
        )


def _check_normalized(state: StateVector, tol: float = _SAMPLE_NORM_TOL) -> None:
    drift = abs(state.norm_sq() - 1.0)
    if drift > tol:
        raise InternalInvariantError(
            f"state norm drifted by {drift:.3e} (tolerance {tol:.0e})"
        )


def ghz_amplitudes(n: int, phase: int) -> np.ndarray:
    """Real amplitude vector of (|0...0> + (-1)^phase |1...1>)/sqrt(2)."""
    _check_qubit_count(n)
    amps = np.zeros(1 << n)
    amps[0] = _SQRT1_2
    amps[-1] = _SQRT1_2 * (1.0 - 2.0 * (phase & 1))
    return amps


def prepare_ghz(n: int) -> StateVector:
    """Prepare the n-qubit GHZ state with amplitude 1/sqrt(2) at 0 and 2^n - 1."""
    return StateVector(n, ghz_amplitudes(n, 0).astype(np.complex128))


def apply_pauli(state: StateVector, err: PauliError) -> StateVector:
    """Apply a single-qubit Pauli; returns a new state, the input is untouched."""
    if err.axis not in _PAULI_AXES:
        raise ConfigurationError(f"unknown Pauli axis {err.axis!r}")
    if not 0 <= err.qubit < state.n_qubits:
        raise ConfigurationError(
            f"qubit index {err.qubit} out of range for {state.n_qubits} qubits"
        )
    idx = np.arange(state.dim)
    bit = (idx >> err.qubit) & 1
    if err.axis == "Z":
        amps = state.amplitudes * (1.0 - 2.0 * bit)
    else:
        flipped = state.amplitudes[idx ^ (1 << err.qubit)]
        if err.axis == "X":
            amps = flipped
        else:  # Y: |0> -> i|1>, |1> -> -i|0>
            amps = flipped * np.where(bit, 1j, -1j)
    return StateVector(state.n_qubits, amps)


def _dense_hadamard(n: int) -> np.ndarray:
    if n not in _hadamard_cache:
        h1 = np.array([[1.0, 1.0], [1.0, -1.0]]) * _SQRT1_2
        m = np.array([[1.0]])
        for _ in range(n):
            m = np.kron(m, h1)
        _hadamard_cache[n] = m
    return _hadamard_cache[n]


def _walsh_hadamard_rows(amps: np.ndarray, n: int) -> np.ndarray:
    """In-place normalized Walsh-Hadamard transform along the last axis."""
    dim = 1 << n
    h = 1
    while h < dim:
        view = amps.reshape(amps.shape[:-1] + (dim // (2 * h), 2, h))
        top = view[..., 0, :] + view[..., 1, :]
        view[..., 1, :] = view[..., 0, :] - view[..., 1, :]
        view[..., 0, :] = top
        h *= 2
    amps *= 2.0 ** (-n / 2.0)
    return amps


def hadamard_all(state: StateVector) -> StateVector:
    """Apply H to every qubit of a working copy (the X-basis change)."""
    n = state.n_qubits
    if n <= _MAX_DENSE_HADAMARD:
        amps = state.amplitudes @ _dense_hadamard(n)
    else:
        amps = _walsh_hadamard_rows(state.amplitudes.copy(), n)
    return StateVector(n, amps)


def index_to_bitstring(index: int, n: int) -> str:
    """Render a basis-state index as |q_{n-1} ... q_0>."""
    if n <= 12:
        table = _bitstring_cache.get(n)
        if table is None:
            table = [format(i, f"0{n}b") for i in range(1 << n)]
            _bitstring_cache[n] = table
        return table[index]
    return format(index, f"0{n}b")


def index_parity(dim: int) -> np.ndarray:
    """Lookup table: bit parity of every index below dim (a power of two)."""
    if dim not in _parity_cache:
        i = np.arange(dim, dtype=np.uint64)
        for shift in (32, 16, 8, 4, 2, 1):
            i ^= i >> np.uint64(shift)
        _parity_cache[dim] = (i & np.uint64(1)).astype(np.int8)
    return _parity_cache[dim]


def _sample_index(probabilities: np.ndarray, rng: RngStream) -> int:
    total = probabilities.sum()
    if abs(total - 1.0) > _SAMPLE_NORM_TOL:
        raise InternalInvariantError(
            f"sampling from un-normalized distribution (sum {total:.8f})"
        )
    cdf = np.cumsum(probabilities)
    u = rng.random() * cdf[-1]
    return int(np.searchsorted(cdf, u, side="right"))


def sample_z_basis(state: StateVector, rng: RngStream) -> str:
    """Draw one computational-basis outcome; the state is not mutated."""
    _check_normalized(state)
    probs = np.abs(state.amplitudes) ** 2
    return index_to_bitstring(_sample_index(probs, rng), state.n_qubits)


def sample_x_basis(state: StateVector, rng: RngStream) -> str:
    """Draw one X-basis outcome (H on every qubit of a copy, then Z sampling)."""
    return sample_z_basis(hadamard_all(state), rng)


def apply_depolarizing_trajectory(
    state: StateVector, p: float, rng: RngStream
) -> StateVector:
    """One depolarizing trajectory: per qubit, probability p of a uniform Pauli.

    Returns the perturbed state; the error pattern is sampled, not averaged,
    so ensemble statistics require many trajectories.
    """
    if not 0.0 <= p <= 1.0:
        raise ConfigurationError(f"depolarizing probability must be in [0, 1], got {p}")
    n = state.n_qubits
    hits = rng.random(n) < p
    kinds = rng.integers(0, 3, size=n)  # fixed draw count keeps streams aligned
    out = state
    for q in range(n):
        if hits[q]:
            out = apply_pauli(out, PauliError(_PAULI_AXES[kinds[q]], q))
    if out is state:
        out = state.copy()
    return out


def sample_shots(
    base: np.ndarray,
    basis: str,
    shots: int,
    noise_p: float,
    rng: RngStream,
) -> np.ndarray:
    """Sample `shots` outcome indices from independent noisy trajectories.

    `base` is a real amplitude vector re-prepared for every shot. Each shot
    draws its own depolarizing pattern; the composed Pauli layer reduces to
    an index permutation and a real sign mask (the leftover (-i)^{#Y} factor
    is a per-shot global phase, irrelevant to sampling probabilities).
    """
    if not 0.0 <= noise_p <= 1.0:
        raise ConfigurationError(
            f"depolarizing probability must be in [0, 1], got {noise_p}"
        )
    if shots < 1:
        raise ConfigurationError(f"shots must be >= 1, got {shots}")
    dim = base.shape[0]
    n = dim.bit_length() - 1
    amps = np.tile(base, (shots, 1))
    if noise_p > 0.0:
        hits = rng.random((shots, n)) < noise_p
        kinds = rng.integers(0, 3, size=(shots, n))
        qubit_bits = 1 << np.arange(n)
        x_mask = ((hits & (kinds == 0)) * qubit_bits).sum(axis=1)
        y_mask = ((hits & (kinds == 1)) * qubit_bits).sum(axis=1)
        z_mask = ((hits & (kinds == 2)) * qubit_bits).sum(axis=1)
        hit_rows = np.nonzero(x_mask | y_mask | z_mask)[0]
        if hit_rows.size:
            idx = np.arange(dim)
            flip = idx[None, :] ^ (x_mask | y_mask)[hit_rows, None]
            moved = np.take_along_axis(amps[hit_rows], flip, axis=1)
            sign_mask = (y_mask | z_mask)[hit_rows, None]
            par = index_parity(dim)[idx[None, :] & sign_mask]
            amps[hit_rows] = moved * (1.0 - 2.0 * par)
    if basis == "X":
        if n <= _MAX_DENSE_HADAMARD:
            amps = amps @ _dense_hadamard(n)
        else:
            amps = _walsh_hadamard_rows(amps, n)
    elif basis != "Z":
        raise ConfigurationError(f"unknown basis {basis!r}")
    probs = amps * amps
    cdf = np.cumsum(probs, axis=1)
    totals = cdf[:, -1]
    if np.abs(totals - 1.0).max() > _SAMPLE_NORM_TOL:
        raise InternalInvariantError("trajectory batch lost normalization")
    u = rng.random((shots, 1)) * cdf[:, -1:]
    return (cdf < u).sum(axis=1)
