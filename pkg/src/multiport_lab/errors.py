"""Exception types shared across the library."""


class MultiportError(Exception):
    """Base class for all multiport-lab errors."""


class DimensionError(MultiportError):
    """Matrix/vector shapes or port counts are incompatible."""


class PortError(MultiportError):
    """A port reference does not resolve, or a port is used twice."""


class SingularClosureError(MultiportError):
    """Feedback closure hit a lossless resonance (trapped bound state)."""


class DegeneratePhaseError(MultiportError):
    """Closed-form device evaluated at a phase point where it is singular."""


class TargetUnreachableError(MultiportError):
    """Requested transmission target lies outside the curve's range."""


class ParseError(MultiportError):
    """Netlist or expression text could not be parsed."""

    def __init__(self, message, line=None, column=None):
        super().__init__(message)
        self.line = line
        self.column = column


class ValidationError(MultiportError):
    """Netlist parsed but violates a structural rule."""
