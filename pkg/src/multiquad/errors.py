"""Exception hierarchy shared by every module."""


class MultiquadError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(MultiquadError, ValueError):
    """An argument lies outside the mathematical domain of the operation."""


class CapacityError(DomainError):
    """An argument exceeds a configured size limit. Treated as a domain
    error so callers can catch both with one clause."""


class SymbolNotClassConstant(DomainError):
    """A quadratic symbol is not constant on the requested residue class."""


class InsufficientPrimes(DomainError):
    """A prime-counting estimator saw no primes in a required subset."""


class ConsistencyError(MultiquadError, RuntimeError):
    """An internal invariant failed. Indicates an arithmetic bug."""
