"""Semantic exception hierarchy shared by all rankvar modules."""


class RankvarError(Exception):
    """Base class for all rankvar errors."""


class ContractError(RankvarError, ValueError):
    """An argument violates a documented precondition (domain, shape, range)."""


class ConstraintError(ContractError):
    """A distribution or copula parameter set violates a defining constraint.

    The message names the equation that failed so callers can fix their
    parameters.
    """


class CapabilityError(RankvarError):
    """The requested operation is not available for this object.

    Raised, for example, when asking for the CDF of a copula family that
    only supports sampling.
    """


class ParseError(ContractError):
    """A configuration string could not be parsed."""
