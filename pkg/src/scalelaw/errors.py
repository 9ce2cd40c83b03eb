"""Exception types shared across the package."""


class ScalelawError(Exception):
    """Base class for all package-specific errors."""


class DomainError(ScalelawError, ValueError):
    """A value is outside the mathematical domain of an operation.

    Examples: parameter counts below one, sparsity outside ``[0, 1)``,
    non-positive compute budgets, a dense law asked to evaluate a sparse
    model. The command line maps this to exit code 2.
    """


class InputError(ScalelawError, ValueError):
    """Malformed external input: CSV records, JSON documents, flag values.

    The command line maps this to exit code 3.
    """
