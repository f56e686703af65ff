"""Exception types raised by the propagator library."""


class ConfigurationError(ValueError):
    """Inconsistent inputs: wrong lengths, bad parameters, unknown names."""


class DomainError(ValueError):
    """A mathematical object cannot be formed on the requested domain."""


class CapabilityError(RuntimeError):
    """A scheme needs data the model cannot supply (e.g. potential derivatives)."""


class ReferenceMismatch(RuntimeError):
    """Two independent reference solutions disagree."""
