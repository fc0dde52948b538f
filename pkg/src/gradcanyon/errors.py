"""Exception types shared across the package.

Every failure mode that callers are expected to handle gets its own class;
they all derive from ``GradCanyonError`` so a pipeline stage can be fenced
with a single except clause.
"""


class GradCanyonError(Exception):
    """Base class for all package-specific errors."""


class PolynomialSyntaxError(GradCanyonError):
    """Input text does not match the polynomial grammar.

    Carries ``position`` (0-based offset into the input) when known.
    """

    def __init__(self, message, position=None):
        super().__init__(message if position is None
                         else f"{message} (at position {position})")
        self.position = position


class VanishingGradient(GradCanyonError):
    """Curvature requested at a point where the gradient vanishes."""


class NotMiniRegular(GradCanyonError):
    """Lowest homogeneous form has no pure z^m term."""


class ExhaustedCandidates(GradCanyonError):
    """Bounded search for a regularizing unitary transform failed."""


class InsufficientTruncation(GradCanyonError):
    """A series is not certified deep enough for the requested operation."""


class IndeterminateAtTruncation(GradCanyonError):
    """A contact order or vanishing order is only bounded below by the
    available truncation; deeper expansion is needed to decide."""


class SolverDivergence(GradCanyonError):
    """Simultaneous root iteration failed to converge."""


class NoDots(GradCanyonError):
    """A Newton polygon operation was asked of an empty dot set."""


class NoMaximumFound(GradCanyonError):
    """Search for local maxima of a curvature coefficient found none."""


class FitUnstable(GradCanyonError):
    """Log-log regression of curvature along an arc was not linear enough."""


class SheetTrackingLoss(GradCanyonError):
    """Sheet count over a horn chart was ambiguous at the probe radius."""


class DegenerateLevel(GradCanyonError):
    """Level value c is too small for the requested grid resolution."""


class NotDegenerateDirection(GradCanyonError):
    """Direction is a simple root of the leading form; no concentration."""


class NonIsolatedSingularity(GradCanyonError):
    """f_z and f_w share a branch; Milnor number is undefined."""


class MultipleRootOfF(GradCanyonError):
    """f has a multiple Newton-Puiseux root; twin networks need f squarefree."""
