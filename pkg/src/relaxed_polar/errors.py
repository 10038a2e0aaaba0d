"""Exception types shared across the library."""


class RelaxedPolarError(Exception):
    """Base class for all library errors."""


class NonInvertible(RelaxedPolarError):
    """det(F) is zero or numerically indistinguishable from zero."""


class NegativeDeterminant(NonInvertible):
    """det(F) < 0: F is not in the identity component GL+(3)."""


class NotARotation(RelaxedPolarError):
    """Matrix is not proper orthogonal within tolerance."""


class ZeroQuaternion(RelaxedPolarError):
    """Quaternion has zero norm; the covering map is undefined at 0."""


class NonPositiveSigma(RelaxedPolarError):
    """Singular values must be strictly positive."""


class NonDistinctSigma(RelaxedPolarError):
    """Singular values are not strictly ordered (gap below tolerance)."""


class UndefinedBranch(RelaxedPolarError):
    """Critical branch is not real-valued at this singular-value triple."""


class ClassicalRegime(RelaxedPolarError):
    """Operation requires the non-classical weight range mu > mu_c >= 0."""


class NotUnimodular(RelaxedPolarError):
    """det(F) != 1 where an SL(3) argument is required."""


class ExhaustedAttempts(RelaxedPolarError):
    """Rejection sampler hit its attempt budget without a match."""
