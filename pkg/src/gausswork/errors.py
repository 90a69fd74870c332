"""Exception types shared across the package."""


class GaussworkError(Exception):
    """Base class for all package-specific errors."""


class InvalidCovariance(GaussworkError, ValueError):
    """A matrix failed one of the covariance-matrix invariants.

    The message starts with the name of the violated invariant
    (``symmetry``, ``positive-definite`` or ``uncertainty``).
    """


class NonPositiveDefinite(InvalidCovariance):
    """Covariance matrix has an eigenvalue <= 0."""


class NumericalFailure(GaussworkError, ArithmeticError):
    """An eigensolver or factorization did not converge, or a guaranteed
    numerical identity was violated beyond tolerance."""


class BadModeCount(GaussworkError, ValueError):
    """Mode count or mode index out of range."""


class BadDimension(GaussworkError, ValueError):
    """Matrix dimension outside the valid range of a formula."""


class DimensionMismatch(GaussworkError, ValueError):
    """Operands have incompatible shapes."""


class NotUnitary(GaussworkError, ValueError):
    """Input matrix is not unitary within tolerance."""


class EmptyConstraintSet(GaussworkError, ValueError):
    """The energy bound admits no squeezing vector (4E < 2n)."""


class RejectionTimeout(GaussworkError, RuntimeError):
    """Flat-measure rejection sampling accepted nothing; the acceptance
    rate is below 1e-6.  Use a deterministic profile instead."""


class EmptyInput(GaussworkError, ValueError):
    """An aggregate was requested over an empty collection."""


class InvalidProfile(GaussworkError, ValueError):
    """Squeezing-profile string or parameters are malformed."""


class InvalidConfig(GaussworkError, ValueError):
    """Experiment configuration is inconsistent."""


class MalformedFile(GaussworkError, ValueError):
    """An input file does not parse as the expected text format."""
