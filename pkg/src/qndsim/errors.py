"""Exception types raised by the simulator."""


class QNDError(Exception):
    """Base class for all simulator errors."""


class DomainError(QNDError, ValueError):
    """An argument lies outside the domain of an operation."""


class TruncationError(DomainError):
    """The Fock truncation is too small for the requested state."""

    def __init__(self, message: str, required_n_max: int):
        super().__init__(message)
        self.required_n_max = required_n_max


class ResonanceError(DomainError):
    """Detuning too close to zero for the dispersive phase-shift picture."""


class ConditioningError(QNDError):
    """Conditioning on an outcome whose probability vanishes."""


class EstimatorUndefinedError(QNDError):
    """The photon-number estimator has no information (g == 0)."""


class ConfigurationError(QNDError):
    """Invalid experiment configuration.

    ``violations`` lists every problem found, not just the first one.
    """

    def __init__(self, message: str, violations: list[str] | None = None):
        self.violations = list(violations) if violations else [message]
        super().__init__(message)


class EmitError(QNDError):
    """Writing results to disk failed; the message names the path."""
