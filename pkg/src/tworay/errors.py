"""Exception types raised by the tworay package."""


class DomainError(ValueError):
    """An argument lies outside the domain where a formula is defined."""


class SearchError(RuntimeError):
    """A bracketed numerical search did not find what it was looking for."""


class NoIntersectionError(SearchError):
    """The two curves handed to an intersection search never cross."""


class SingularityError(ArithmeticError):
    """Evaluation requested too close to a pole of a closed-form expression."""


class ResolutionError(ValueError):
    """Too few Monte-Carlo samples to resolve the requested probability."""


class TraceFileError(ValueError):
    """A distance trace file is missing or contains an invalid entry."""
