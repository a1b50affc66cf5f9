"""Monte Carlo harness for fork attacks on a stateful GHZ-parity continuity protocol."""

from .adversary import AttackerModel, ForkBranch, branch_respond, fork
from .errors import (
    ConfigurationError,
    FitUnavailableError,
    InternalInvariantError,
    MalformedEvidenceError,
    ProtocolError,
)
from .experiments import (
    DecayFit,
    SweepRow,
    SweepSpec,
    fit_decay,
    run_figure_suite,
    sweep,
)
from .game import (
    GameConfig,
    GameResult,
    estimate_fsr,
    estimate_stateless,
    run_honest_execution,
    run_security_game,
    wilson_interval,
)
from .protocol import (
    AuditOutcome,
    BasisPolicy,
    RoundTranscript,
    VerifierState,
    audit,
    choose_basis,
    issue_challenge,
    run_stateless_round,
    run_temporal_round,
)
from .rng import RngStream, make_rng
from .statevec import (
    MAX_QUBITS,
    PauliError,
    StateVector,
    apply_depolarizing_trajectory,
    apply_pauli,
    hadamard_all,
    prepare_ghz,
    sample_x_basis,
    sample_z_basis,
)
from .witness import (
    Challenge,
    Evidence,
    WitnessState,
    generate_evidence,
    init_witness,
    parity,
    update,
)

__version__ = "0.1.0"
