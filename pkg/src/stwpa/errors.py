"""Exception and warning types shared across the package.

Parameter-level problems (bad values handed to a constructor or routine)
raise ``ValueError`` subclasses; failures discovered while computing raise
``SimulationError`` subclasses.  The CLI maps the former to exit code 2 and
the latter to exit code 3.
"""


class SimulationError(Exception):
    """A numerical routine failed on otherwise well-formed input."""


class NoMinimumFound(SimulationError):
    """No local potential minimum exists in the scan window."""


class NoSignChange(SimulationError):
    """Root bracketing failed: same sign at both bracket ends."""


class SolveFailed(SimulationError):
    """The implicit mass-matrix solve did not converge."""


class NonFiniteState(SimulationError):
    """Integration produced a non-finite lattice state."""


class NoPeakInWindow(SimulationError):
    """Pulse measurement window contains no usable extremum."""


class MultiplePeaks(SimulationError):
    """Pulse measurement window contains more than one pulse."""


class NoHorizon(SimulationError):
    """The probe velocity never crosses the soliton velocity."""


class ImaginaryVelocity(SimulationError):
    """Probe velocity radicand is non-positive (unphysical background)."""


class GridTooCoarse(SimulationError):
    """Sampling grid does not resolve the structure being analyzed."""


class PotentialNotDecayed(SimulationError):
    """Schroedinger potential has not decayed at the grid ends."""


class NonPositiveInput(ValueError):
    """A strictly positive physical parameter was zero or negative."""


class InvalidPolarity(ValueError):
    """Soliton polarity incompatible with the nonlinearity sign."""


class WrongPolarity(ValueError):
    """Pulse polarity or nonlinearity outside the KdV scattering regime."""


class InsufficientClearanceWarning(UserWarning):
    """Seeded soliton sits too close to a fixed boundary."""


class ProbeAmplitudeWarning(UserWarning):
    """Probe amplitude is not small compared to the background."""
