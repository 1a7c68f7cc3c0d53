"""Exception types raised across the package."""


class LorentzRiemannError(Exception):
    """Base class for all package errors."""


class DomainError(LorentzRiemannError, ValueError):
    """A parameter lies outside the admissible domain of a profile."""


class ToleranceNotMet(LorentzRiemannError, ArithmeticError):
    """The adaptive quadrature could not certify the requested tolerance."""


class Divergent(LorentzRiemannError, ArithmeticError):
    """An improper limit requested for a case that has none."""


class DegeneratePoint(LorentzRiemannError, ValueError):
    """The induced metric is (numerically) degenerate at the point."""


class SingularPoint(LorentzRiemannError, ValueError):
    """The gradient of an implicit function vanishes at the point."""


class NoLimitLine(LorentzRiemannError, ValueError):
    """The case does not converge to a straight line orthogonal to the symmetry plane."""


class NoConelikePoint(LorentzRiemannError, ValueError):
    """The case has no conelike point, so no translation period exists."""
