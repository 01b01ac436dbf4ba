"""Exception hierarchy.

Every error carries a short machine-readable ``code`` so the CLI can emit a
structured error document without string matching.
"""

from __future__ import annotations


class BTGPError(Exception):
    code = "error"

    def __init__(self, message: str, **details):
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict:
        return {"code": self.code, "message": str(self), "details": self.details}


class ParameterDomainError(BTGPError, ValueError):
    code = "parameter_domain"


class DomainError(BTGPError, ValueError):
    code = "domain"


class UnsupportedOperationError(BTGPError):
    code = "unsupported_operation"


class InputError(BTGPError, ValueError):
    code = "input"


class DataError(BTGPError, ValueError):
    """Bad inspection data; ``details`` names the offending asset/record."""

    code = "data"


class FitError(BTGPError):
    code = "fit"


class SelectionError(FitError):
    code = "selection"


class CensusError(BTGPError):
    code = "census"


class NoInteriorMaximumError(BTGPError):
    code = "no_interior_maximum"


class DegeneratePolicyError(BTGPError):
    code = "degenerate_policy"


class OptimizationError(BTGPError):
    code = "optimization"


class TruncationError(BTGPError):
    code = "truncation"
