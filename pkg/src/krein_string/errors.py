"""Exception types shared across the package.

The CLI maps these onto exit codes: configuration problems (bad spec files,
mismatched grids) exit with 2, numerical failures (stability, rank,
regularization) with 3, I/O with 4.
"""


class KreinStringError(Exception):
    """Base class for all package-specific failures."""


class SpecError(KreinStringError, ValueError):
    """Invalid string specification: bad values, counts, or file syntax."""


class GridError(KreinStringError, ValueError):
    """Incompatible or malformed time grids / waveforms."""


class StabilityError(KreinStringError, RuntimeError):
    """Time step too coarse for the stiffest mode (Nyquist or RK4 bound)."""


class DegenerateSpectrumError(KreinStringError, RuntimeError):
    """Near-multiple eigenvalues beyond tolerance; carries a conditioning report."""


class RankError(KreinStringError, RuntimeError):
    """Connector rank degenerate or inconsistent with the requested solve."""


class RegularizationError(KreinStringError, RuntimeError):
    """Truncated solve left a residual above the configured bound."""


class RecoveryError(KreinStringError, RuntimeError):
    """String recovery aborted; carries the failing step index."""

    def __init__(self, message: str, step: int | None = None):
        super().__init__(message)
        self.step = step


class TruncationError(KreinStringError, RuntimeError):
    """Improper-integral truncation bound above the requested tolerance."""
