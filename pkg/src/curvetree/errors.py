"""Exception and warning types raised across the package."""


class CurveTreeError(Exception):
    """Base class for every error raised by curvetree."""


class UsageError(CurveTreeError):
    """Malformed user input (bad polynomial text, bad flags, bad config)."""


class GeometryError(CurveTreeError):
    """A numeric or geometric failure while analysing a level curve."""


class PolySyntaxError(UsageError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifier(PolySyntaxError):
    pass


class ExponentOverflow(PolySyntaxError):
    pass


class DegenerateInput(UsageError):
    pass


class NotAStrictMinimum(GeometryError):
    pass


class NotACriticalPoint(GeometryError):
    pass


class NoValidRadius(GeometryError):
    pass


class LevelEscapesNeighbourhood(GeometryError):
    pass


class NoComponentAroundOrigin(GeometryError):
    pass


class RefinementDiverged(GeometryError):
    pass


class ConstantInY(GeometryError):
    pass


class BranchSelfCrossing(GeometryError):
    pass


class SeedDetectionFailed(GeometryError):
    pass


class NewtonDiverged(GeometryError):
    pass


class EventMismatch(GeometryError):
    pass


class Unrooted(CurveTreeError):
    pass


class BelowNumericFloor(UsageError):
    pass


class TangencyTooClose(UserWarning):
    """Two tangencies closer than the merge tolerance were merged into one."""


class OriginOnCriticalFiber(UserWarning):
    """The origin lies on a critical fibre; the root was placed at that vertex."""
