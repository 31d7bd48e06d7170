"""Exception and warning types shared across the package."""

__all__ = [
    "RatlinError",
    "PoleAt",
    "DegreeTooLow",
    "ShapeMismatch",
    "SingularAnsatz",
    "SingularXY",
    "SingularTransform",
    "SingularLeadingCoefficient",
    "SingularABlock",
    "DegenerateABlock",
    "EvenDegree",
    "NonRealMu",
    "NonRealBasis",
    "NotSymmetric",
    "NotSymmetricTransfer",
    "NotHermitianTransfer",
    "NotMinimal",
    "RankMismatch",
    "NumericallySingularSystem",
    "BackendFailure",
    "PoleEigenvalue",
    "NotAnEigenpair",
    "NoInfiniteEigenvalue",
    "NonRegular",
    "RankZeroResidueWarning",
    "IllConditionedInterpolationWarning",
    "NonMinimalWarning",
    "ConversionConditionWarning",
    "RankTieWarning",
]


class RatlinError(Exception):
    """Base class for all errors raised by this package."""


class PoleAt(RatlinError):
    """Evaluation was requested at (numerically) a pole."""

    def __init__(self, lam):
        self.lam = lam
        super().__init__(f"evaluation point {lam} is numerically a pole")


class DegreeTooLow(RatlinError):
    """Polynomial part has degree < 2, so no companion-style pencil exists."""


class ShapeMismatch(RatlinError):
    """Matrix dimensions are inconsistent with the requested block grid."""


class SingularAnsatz(RatlinError):
    """The ansatz matrix [v (x) I  H] (or its block-transposed twin) is singular."""


class SingularXY(RatlinError):
    """A state-space transformation matrix X or Y is singular."""


class SingularTransform(RatlinError):
    """A strict-equivalence factor is singular."""


class SingularLeadingCoefficient(RatlinError):
    """The leading coefficient of the polynomial part is singular."""


class SingularABlock(RatlinError):
    """The (1,1) block of a system matrix is singular at the given point."""


class DegenerateABlock(RatlinError):
    """det of the (1,1) block pencil vanishes identically."""


class EvenDegree(RatlinError):
    """Construction requires an odd polynomial degree."""


class NonRealMu(RatlinError):
    """The scaling factor must be real for Hermitian constructions."""


class NonRealBasis(RatlinError):
    """Hermitian constructions require real recurrence coefficients."""


class NotSymmetric(RatlinError):
    """Input lacks the required symmetric structure."""


class NotSymmetricTransfer(RatlinError):
    """The realization's transfer function is not symmetric."""


class NotHermitianTransfer(RatlinError):
    """The realization's transfer function is not Hermitian."""


class NotMinimal(RatlinError):
    """The state-space realization is not minimal."""


class RankMismatch(RatlinError):
    """Numerical rank differs from the expected value."""

    def __init__(self, found, expected):
        self.found = found
        self.expected = expected
        super().__init__(f"numerical rank {found}, expected {expected}")


class NumericallySingularSystem(RatlinError):
    """A linear system that should have a unique solution is numerically singular."""


class BackendFailure(RatlinError):
    """The dense eigenvalue backend failed to converge."""


class PoleEigenvalue(RatlinError):
    """The eigenvalue coincides with a pole, so recovery is not defined."""

    def __init__(self, lam):
        self.lam = lam
        super().__init__(f"eigenvalue {lam} coincides with a pole")


class NotAnEigenpair(RatlinError):
    """The supplied (lambda, vector) pair is not an eigenpair to tolerance."""


class NoInfiniteEigenvalue(RatlinError):
    """No infinite eigenvalue information is available."""


class NonRegular(RatlinError):
    """The rational matrix appears to be singular (rank deficient as a rational matrix)."""


class RankZeroResidueWarning(UserWarning):
    """A residue matrix with numerical rank zero was dropped."""


class IllConditionedInterpolationWarning(UserWarning):
    """Determinant interpolation failed its cross-check and was refined."""


class NonMinimalWarning(UserWarning):
    """A construction received a non-minimal realization."""


class ConversionConditionWarning(UserWarning):
    """Change of basis to monomials may be ill conditioned at this degree."""


class RankTieWarning(UserWarning):
    """A rank decision was close to the threshold; the smaller rank was chosen."""
