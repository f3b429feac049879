"""Semantic exception hierarchy shared by all winfer modules."""


class WinferError(Exception):
    """Base class for all library errors."""


class DomainMismatchError(WinferError):
    """Weight function, densities, or rules live on different outcome spaces."""


class NonConvergentIntegralError(WinferError):
    """Quadrature/series budget exhausted with the error estimate above tolerance."""


class NoSamplerError(WinferError):
    """Distribution has no sampler contract."""


class AlphabetTooLargeError(WinferError):
    """Subset-enumeration oracle limited to small finite alphabets."""


class EnumerationTooLargeError(WinferError):
    """Exact product-space or composition enumeration exceeds the configured cap."""


class InfiniteKLError(WinferError):
    """Operation requires a finite weighted Kullback-Leibler divergence."""


class IllegalParameterError(WinferError):
    """Family or weight parameters outside their legal range."""


class ParameterOutOfDomainError(WinferError):
    """Natural parameter (or a scaled/mixed one) left the family domain."""


class ZeroWeightMassError(WinferError):
    """E_phi(p) = 0; tilted quantities are undefined."""


class RegularityError(WinferError):
    """A differentiation/integration interchange identity failed its self-test."""


class SchemaError(WinferError):
    """Problem-spec JSON failed validation."""
