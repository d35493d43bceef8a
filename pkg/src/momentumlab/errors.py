"""Exception hierarchy shared across the package.

CLI exit codes: config errors map to 2, data/format errors to 3 and
divergence to 4 (see harness.cli).
"""


class MomentumLabError(Exception):
    """Base class for all package-specific errors."""


class RejectedInputError(MomentumLabError, ValueError):
    """An argument violates a documented precondition."""


class DivergenceError(MomentumLabError, RuntimeError):
    """A trajectory left the finite range.

    Carries the last finite state (``state``) and, for training or
    integration drivers, the records accumulated so far (``trajectory``).
    """

    def __init__(self, message, state=None, trajectory=None):
        super().__init__(message)
        self.state = state
        self.trajectory = trajectory if trajectory is not None else []


class DegenerateDataError(MomentumLabError):
    """Dataset admits no positive-definite limiting kernel (parallel inputs)."""


class GenerationError(MomentumLabError):
    """Synthetic data generation exhausted its retry budget."""


class FormatError(MomentumLabError):
    """A binary input file is malformed; the message names the byte offset."""


class ConfigError(MomentumLabError):
    """An experiment configuration is invalid."""
