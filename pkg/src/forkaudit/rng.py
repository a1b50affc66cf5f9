"""Deterministic random streams with hierarchical seed derivation.

Every stochastic component takes an explicit stream. Streams are derived
from integer paths (master seed, context tag, index, ...) so that trials
are independent and results do not depend on scheduling order.
"""

from __future__ import annotations

import numpy as np

# An explicitly seeded generator; identical paths yield identical sequences
# on every platform (PCG64 is fully specified).
RngStream = np.random.Generator


def make_rng(*entropy: int) -> RngStream:
    """Build a stream from an integer derivation path."""
    return np.random.default_rng(np.random.SeedSequence(entropy))


def derive_seed(*entropy: int) -> int:
    """Collapse a derivation path into a single reproducible 32-bit seed."""
    return int(np.random.SeedSequence(entropy).generate_state(1)[0])
