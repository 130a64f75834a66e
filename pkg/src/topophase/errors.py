"""Exception types shared across the package.

Each exception carries the CLI exit code it maps to.
"""


class TopoPhaseError(Exception):
    exit_code = 1


class ParseError(TopoPhaseError):
    exit_code = 2


class DegenerateState(TopoPhaseError):
    exit_code = 3


class DimensionMismatch(TopoPhaseError):
    exit_code = 2


class BadAxis(TopoPhaseError):
    exit_code = 2


class UndefinedPhase(TopoPhaseError):
    exit_code = 4


class NotASymmetry(TopoPhaseError):
    exit_code = 5


class UndersampledPath(TopoPhaseError):
    exit_code = 6


class NotAGroup(TopoPhaseError):
    exit_code = 3


class NotClosedInOrbitSpace(TopoPhaseError):
    exit_code = 5
