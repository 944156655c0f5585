"""Error taxonomy for the strip-minimization library.

Every failure mode that callers are expected to handle has its own exception
class so that CLI and sweep drivers can react per-category (record and
continue, abort, retry on a finer grid, ...). All of them derive from
:class:`StripminError`.
"""

from __future__ import annotations

__all__ = [
    "StripminError",
    "Supercritical",
    "NoBracket",
    "GridTooCoarse",
    "QuadratureTailLoss",
    "RangeMismatch",
    "NotConverged",
    "NonPositiveMode",
    "NonPositive",
    "Stalled",
    "NonConvergedLinearSolve",
    "GridMismatch",
    "SolverFailure",
    "SingularProjection",
    "NegativeRadicandBothSides",
    "InsufficientPoints",
    "DegenerateCluster",
    "EpsTooLarge",
    "DivergentMass",
    "BadConfig",
]


class StripminError(Exception):
    """Base class for all library-specific errors."""


class Supercritical(StripminError):
    """No decaying ground state exists: d >= 3 and p >= (d+2)/(d-2)."""


class NoBracket(StripminError):
    """A bisection bracket could not be established (shooting or transition)."""


class GridTooCoarse(StripminError):
    """A converged result fails its discrete residual check on this grid."""


class QuadratureTailLoss(StripminError):
    """Estimated tail contribution beyond the grid exceeds the tolerance."""


class RangeMismatch(StripminError):
    """A profile is needed beyond its resolvable radius and cannot be extended."""


class NotConverged(StripminError):
    """An iterative eigensolver exceeded its iteration cap."""


class NonPositiveMode(StripminError):
    """A converged principal eigenfunction changes sign (discretization failure)."""


class NonPositive(StripminError):
    """An eigenvalue that must be positive is not (trivial branch never destabilizes)."""


class Stalled(StripminError):
    """Quotient minimization hit its iteration cap with the residual above tol.

    The best iterate is attached so callers can still inspect or record it.

    Attributes
    ----------
    field : StripField
        Best (lowest-quotient) iterate reached before stalling.
    breakdown : EnergyBreakdown
        Energy breakdown of that iterate, including its residual.
    """

    def __init__(self, message, field=None, breakdown=None):
        super().__init__(message)
        self.field = field
        self.breakdown = breakdown


class NonConvergedLinearSolve(StripminError):
    """An inner linear solve produced non-finite values."""


class GridMismatch(StripminError):
    """Two fields that must share a grid do not."""


class SolverFailure(StripminError):
    """A sweep point failed; recorded per-point, the sweep continues."""


class SingularProjection(StripminError):
    """A right-hand side has a kernel component above tolerance."""


class NegativeRadicandBothSides(StripminError):
    """The pitchfork coefficient's sign is inconsistent with a pitchfork."""


class InsufficientPoints(StripminError):
    """Not enough usable diagram points for the requested fit."""


class DegenerateCluster(StripminError, UserWarning):
    """Requested mode count splits a numerically coincident eigenvalue cluster.

    Doubles as a warning category: spectrum routines extend the returned list
    to the full cluster and ``warnings.warn`` with this class instead of
    raising, so callers that only want the values are not interrupted.
    """


class EpsTooLarge(StripminError):
    """Asymptotic-expansion comparison requested outside the asymptotic regime."""


class DivergentMass(StripminError):
    """The half-space mass integral diverges for this dimension (N = 4)."""


class BadConfig(StripminError):
    """Configuration schema violation; the message carries the field path."""
