"""Shared exception types, mapped to CLI exit codes."""


class LeadLagError(Exception):
    """Base class for all package errors."""


class UsageError(LeadLagError):
    """Bad command-line invocation or inconsistent flags (exit code 1)."""


class DataError(LeadLagError):
    """Invalid input data or configuration (exit code 2)."""


class NumericError(LeadLagError):
    """Numerical failure, e.g. an invalid spectral embedding (exit code 3)."""
