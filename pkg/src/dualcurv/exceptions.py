"""Exception hierarchy shared by the library and the command line front end."""


class DualCurvError(Exception):
    """Base class for all errors raised by :mod:`dualcurv`."""

    exit_code = 1


class DomainError(DualCurvError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""

    exit_code = 1


class InvariantError(DomainError):
    """A body or subspace violates one of its structural invariants.

    ``invariant`` names the violated condition so that callers (and the
    JSON loader) can report it in a structured way.
    """

    def __init__(self, invariant, message):
        super().__init__(f"[{invariant}] {message}")
        self.invariant = invariant


class OpenRangeError(DomainError):
    """Requested bound lies in the parameter band where no bound is known."""


class UnsupportedError(DualCurvError):
    """The operation is not implemented for this body/subspace pairing."""

    exit_code = 1


class ConfigError(DualCurvError):
    """Invalid configuration: quadrature parameters, grids, files, flags."""

    exit_code = 2


class BodyFileError(ConfigError):
    """A body file could not be parsed or failed validation."""

    def __init__(self, invariant, message):
        super().__init__(f"[{invariant}] {message}")
        self.invariant = invariant
