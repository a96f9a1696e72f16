"""Exception types shared across the package."""


class SingleRailError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SingleRailError):
    """A configuration value is out of its documented domain."""


class RegisterError(SingleRailError):
    """Mode bookkeeping went wrong: unknown name, collision, or mismatch."""


class CapacityError(SingleRailError):
    """An operation would push a state past its photon-number cutoff.

    The cutoff is a wiring guard, not a truncation: states never silently
    lose amplitude, they refuse to grow.
    """


class DegenerateStateError(SingleRailError):
    """A state collapsed to (numerical) zero where a unit vector was needed."""


class ContractError(SingleRailError):
    """A protocol step was fed an object that violates its precondition."""


class ParameterWarning(UserWarning):
    """Parameters are legal but outside the regime the model is trusted in."""
