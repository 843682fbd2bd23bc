"""Exception hierarchy shared across the library."""


class SelbergError(Exception):
    """Base class; CLI maps subclasses to exit codes."""


class DimensionMismatch(SelbergError):
    pass


class EqualPoints(SelbergError):
    pass


class SingularPencil(SelbergError):
    pass


class RegularPencil(SelbergError):
    pass


class DegenerateCoefficients(SelbergError):
    pass


class JordanFailure(SelbergError):
    """Float-mode Jordan clustering failed; retry in exact mode."""


class UndefinedAngle(SelbergError):
    """Pair type admits no invariant angle function."""


class UnknownSingular(SelbergError):
    """Singular pencil with too few real pseudo-eigenvalues; existence unclear."""


class UnsupportedK(SelbergError):
    pass


class InconclusiveNumeric(SelbergError):
    """Search budget exhausted without a certificate; rerun in exact mode."""


class ChamberViolation(SelbergError):
    """Chamber hypotheses of the bisector-disjointness test are not met."""


class SeedNotInterior(SelbergError):
    pass


class StabilizerHit(SelbergError):
    pass


class NotAbelian(SelbergError):
    pass


class BadSpectrum(SelbergError):
    pass


class UnsupportedRank(SelbergError):
    pass


class GenericityViolation(SelbergError):
    pass


class EpsilonOutOfRange(SelbergError):
    pass


class UnitModulusEigenvalue(SelbergError):
    pass


class PreconditionFail(SelbergError):
    pass


class NotOrthogonal(SelbergError):
    pass


class SemidefiniteNormal(SelbergError):
    """Normal vector is semi-definite, so its locus in P(n) is empty."""
