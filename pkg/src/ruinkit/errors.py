"""Exception hierarchy.

Validation problems derive from :class:`DistributionError` (a ``ValueError``);
numerical breakdowns derive from :class:`NumericalError`. The CLI maps the
two families onto distinct exit codes.
"""

from __future__ import annotations


class RuinKitError(Exception):
    """Base class for every error raised by this package."""


# -- input validation -------------------------------------------------------


class DistributionError(RuinKitError, ValueError):
    """The claims distribution (or a parametric family) is not admissible."""


class SumNotOne(DistributionError):
    pass


class NetProfitViolated(DistributionError):
    pass


class SupportTooSmall(DistributionError):
    pass


class NegativeProbability(DistributionError):
    pass


class InvalidAb0(DistributionError):
    pass


# -- numerical failures -----------------------------------------------------


class NumericalError(RuinKitError, ArithmeticError):
    """A computation could not be completed to the required accuracy."""


class DeflationResidual(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass


class StructureViolation(NumericalError):
    """Computed roots or coefficients contradict the known root structure.

    ``item`` names the structural property that failed, e.g.
    ``"unit-root coefficient"`` or ``"conjugate pairing"``.
    """

    def __init__(self, item: str, detail: str):
        super().__init__(f"{item}: {detail}")
        self.item = item
        self.detail = detail


class DimensionMismatch(NumericalError):
    pass


class SingularSystem(NumericalError):
    pass


class IllConditioned(NumericalError):
    def __init__(self, message: str, residual: float):
        super().__init__(message)
        self.residual = residual


class ImaginaryResidue(NumericalError):
    pass


class DegenerateRatio(NumericalError):
    pass
