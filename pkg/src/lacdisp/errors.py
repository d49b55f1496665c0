"""Exception types shared across the library."""


class LacdispError(Exception):
    """Base class for all library errors."""


# --- sequence generation -------------------------------------------------

class GrowthViolation(LacdispError):
    """A declared growth factor is not met by some consecutive ratio."""


class InsufficientGrowth(LacdispError):
    """The subsampling step requires r**l > e**2 and it does not hold."""


class IndexOutOfRange(LacdispError):
    """The parent sequence is too short for the requested subsample."""


class PrecisionTooLow(LacdispError):
    """A dilation vector has too few bits for the given sequence terms."""


# --- convex geometry ------------------------------------------------------

class BadPlaneIndex(LacdispError):
    """Rotation plane index outside {2, ..., d}."""


class NotOrthogonal(LacdispError):
    """Matrix fails the orthogonality tolerance."""


class NegativeDeterminant(LacdispError):
    """Orthogonal matrix with det = -1 cannot be decomposed as a rotation."""


class DegenerateBody(LacdispError):
    """Convex body with (near-)zero volume."""


class EmptySlice(LacdispError):
    """Slicing plane does not meet the interior of the body."""


# --- test family ----------------------------------------------------------

class ResolutionTooCoarse(LacdispError):
    """Grid resolution m is too coarse for a snapping step to succeed."""


class VolumeTooSmall(LacdispError):
    """Convex body below the volume budget of the inclusion chain."""


# --- dispersion -----------------------------------------------------------

class EmptyInput(LacdispError):
    """An operation that needs at least one point received none."""


class DimensionUnsupported(LacdispError):
    """Exact empty-box search is limited to d <= 3."""


class FitUnderdetermined(LacdispError):
    """Not enough usable samples for a scaling-law fit."""


# --- smoothed counting ----------------------------------------------------

class NotAxisAligned(LacdispError):
    """Fourier-side counter requires an axis-aligned target rectangle."""


class SingularMatrix(LacdispError):
    """Matrix must be invertible."""


class UnderSampled(LacdispError):
    """Monte Carlo estimate requested with too few samples."""


# --- cli / configuration --------------------------------------------------

class ConfigError(LacdispError):
    """Invalid run configuration."""
