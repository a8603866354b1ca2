"""Exception types raised by the library.

Everything derives from ValueError so callers that only care about "bad
input vs. bug" can catch the built-in type, while the CLI and tests can
distinguish the specific failure modes.
"""


class DuplicateNodes(ValueError):
    """Two interpolation nodes (or brute-force points) coincide."""


class InvalidRatio(ValueError):
    """The noise level / minimum amplitude ratio is outside the valid range."""


class DegenerateLayout(ValueError):
    """A constructed node layout has coinciding or misordered points."""


class OverlappingIntervals(ValueError):
    """Neighborhood radius so large that the per-source intervals overlap."""


class IncompatibleGrid(ValueError):
    """Frequency grid cannot be decimated evenly for the requested matrix size."""


class InsufficientSamples(ValueError):
    """Too few frequency samples for the requested operation."""


class DegenerateNoiseSpace(ValueError):
    """Assumed source count leaves no noise space to project onto."""


class InfeasiblePacking(ValueError):
    """Requested source count and separation do not fit in the cluster interval."""


class DegenerateLabels(ValueError):
    """All Monte-Carlo trials share one outcome; no boundary can be fitted."""


class GridTooLarge(ValueError):
    """Candidate grid exceeds the exhaustive-search size limit."""
