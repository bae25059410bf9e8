"""Exception hierarchy shared across the library.

Two families matter for the CLI exit-code contract: validation errors
(malformed trees, illegal operations, bad budgets) map to exit code 2,
numeric-domain errors (non-SPD matrices, dimension mismatches, degenerate
spectra) map to exit code 3.  Every error carries a short machine-readable
``code`` so reports stay greppable.
"""


class ChernoffError(Exception):
    """Base class for all library errors."""

    code = "error"

    def __init__(self, message, code=None):
        super().__init__(message)
        if code is not None:
            self.code = code


class ValidationError(ChernoffError):
    """Structurally invalid input (trees, operations, configs)."""

    code = "validation"


class NumericDomainError(ChernoffError):
    """Input outside the numeric domain of an operation."""

    code = "numeric_domain"


class ParseError(ValidationError):
    code = "parse"


class CycleError(ValidationError):
    code = "cycle"


class DisconnectedError(ValidationError):
    code = "disconnected"


class WeightOutOfRange(ValidationError):
    code = "weight_out_of_range"


class DuplicateEdge(ValidationError):
    code = "duplicate_edge"


class InvalidNode(ValidationError):
    code = "invalid_node"


class EdgeNotShared(ValidationError):
    code = "edge_not_shared"


class WeightFactorMismatch(ValidationError):
    code = "weight_factor_mismatch"


class EdgeNotFound(ValidationError):
    code = "edge_not_found"


class WouldCreateCycle(ValidationError):
    code = "would_create_cycle"


class InvalidBudget(ValidationError):
    code = "invalid_budget"


class DimensionMismatch(NumericDomainError):
    code = "dimension_mismatch"


class NotPositiveDefinite(NumericDomainError):
    code = "not_positive_definite"


class NonPositiveEigenvalue(NumericDomainError):
    code = "non_positive_eigenvalue"


class DegenerateSpectrum(NumericDomainError):
    code = "degenerate_spectrum"


class DeterminantMismatch(NumericDomainError):
    code = "determinant_mismatch"


class RankDeficientProjection(NumericDomainError):
    code = "rank_deficient_projection"
