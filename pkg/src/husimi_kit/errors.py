"""Exception hierarchy.

The CLI maps these to exit codes: parse problems exit 2, numerical
refusals exit 3, evolution instability exits 4.
"""


class HusimiKitError(Exception):
    """Base class for all errors raised by this package."""


class SpecParseError(HusimiKitError, ValueError):
    """An operator/state/grid specification string or file is malformed."""


class InvalidDimensionError(HusimiKitError, ValueError):
    """Truncation dimension outside the operation's allowed range."""


class TruncationError(HusimiKitError):
    """A coherent object at the requested point is unreliable at this dim.

    Carries the measured norm deficiency 1 - ||v||^2.
    """

    def __init__(self, message, norm_deficiency):
        super().__init__(message)
        self.norm_deficiency = norm_deficiency


class ValidationError(HusimiKitError, ValueError):
    """An input fails a mathematical precondition (e.g. not a density matrix)."""


class QuadratureWindowError(HusimiKitError):
    """The position-kernel has not decayed at the edge of the y window."""


class AliasingError(HusimiKitError):
    """Grid spacing or padding margin too coarse for the smoothing kernel."""


class UnderResolvedError(HusimiKitError):
    """Torus sampling cannot resolve the requested derivative orders."""


class OverlapUnderflowError(HusimiKitError):
    """Continuation points so far apart that the overlap underflows."""


class ResolutionRefusal(HusimiKitError):
    """Weyl-symbol family is delta-like; the Wigner quadrature is refused.

    Carries the measured relative change of the symbol grid under basis
    refinement.
    """

    def __init__(self, message, instability):
        super().__init__(message)
        self.instability = instability


class GridResolutionError(HusimiKitError):
    """Spectral content of a grid reaches the dealiasing band."""


class InstabilityError(HusimiKitError):
    """Time evolution aborted; partial results are attached.

    ``snapshots`` holds the grids produced before the abort.
    """

    def __init__(self, message, snapshots=None):
        super().__init__(message)
        self.snapshots = snapshots or []
