"""Exception hierarchy.

Precondition failures (bad inputs, violated contracts) map to CLI exit
code 2; resource/budget exhaustion maps to exit code 3.
"""


class BanachlabError(Exception):
    """Base class for all library errors."""


class PreconditionError(BanachlabError):
    """An input violates a documented precondition."""


class InvalidSpaceError(PreconditionError):
    """Space description is malformed (e.g. lp with p < 1)."""


class ParameterError(PreconditionError):
    """Scalar parameter outside its admissible range."""


class RankError(PreconditionError):
    """Vectors expected to be linearly independent are not."""


class BlockOrderingError(PreconditionError):
    """Block index sets are not strictly increasing."""


class PremiseError(PreconditionError):
    """A renorming premise fails (e.g. functional outside the dual ball)."""


class SchemaError(PreconditionError):
    """Input file does not match the expected JSON schema."""


class ExactPathError(PreconditionError):
    """Exact rational arithmetic requested where it is not available."""


class NumericError(BanachlabError):
    """A numeric evaluation produced a non-finite value."""


class ResourceError(BanachlabError):
    """Computation exceeds a configured resource limit."""


class SupportCapError(ResourceError):
    """Vector support exceeds the configured cap for an exponential kernel."""


class BudgetError(ResourceError):
    """Optimization budget too small for the requested computation."""


class ScanExhaustedError(ResourceError):
    """Index scan ended without an acceptable candidate."""

    def __init__(self, msg: str, best_index: int | None = None,
                 best_margin: float | None = None):
        super().__init__(msg)
        self.best_index = best_index
        self.best_margin = best_margin


class LpInfeasibleError(BanachlabError):
    """Linear program has no feasible point."""


class LpUnboundedError(BanachlabError):
    """Linear program objective is unbounded over the feasible set."""
