"""Exception types shared across the simulator."""


class ConfigurationError(ValueError):
    """A parameter is outside its legal range or a config field is unknown."""


class ProtocolError(RuntimeError):
    """Round ordering or basis bookkeeping was violated."""


class MalformedEvidenceError(ValueError):
    """Evidence does not have the shape the audit requires."""


class InternalInvariantError(RuntimeError):
    """A simulator invariant (e.g. state normalization) broke."""


class FitUnavailableError(ValueError):
    """Too few usable data points for a decay fit."""

    def __init__(self, rows_available: int):
        self.rows_available = rows_available
        super().__init__(
            f"decay fit needs at least 3 rows with fsr > 0, got {rows_available}"
        )
