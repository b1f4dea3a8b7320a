"""Exception hierarchy shared by every module and mapped to CLI exit codes."""


class WlabError(Exception):
    """Base class for all errors raised by waringlab."""


class IntegrityError(WlabError):
    """A numerical self-check failed (non-real a_term, quadrature drift, ...)."""

    exit_code = 2


class NonStabilizationError(IntegrityError):
    """A p-adic density did not settle before the level cap."""


class CapacityError(WlabError):
    """A count would overflow its storage cell, or a request exceeds a size cap."""

    exit_code = 3


class InsufficientDataError(WlabError):
    """Too few nonzero points to fit an exponent."""
