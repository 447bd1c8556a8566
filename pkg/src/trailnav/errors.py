"""Exception types shared across the library."""


class TrailNavError(Exception):
    """Base class for all trailnav errors."""


class EmptyInput(TrailNavError):
    """An operation received an empty cloud or scan."""


class ShapeError(TrailNavError):
    """Array dimensions do not match the declared contract."""


class DomainError(TrailNavError):
    """A scalar input lies outside its valid range."""


class InsufficientPoints(TrailNavError):
    """Too few points for the requested neighborhood statistic."""


class DegenerateGeometry(TrailNavError):
    """Point correspondences do not constrain a rigid transform."""


class CollisionSpace(TrailNavError):
    """A node with zero traversability was offered to the planner."""


class NoTraversableSpace(TrailNavError):
    """The map contains no point with positive traversability."""


class ReplanRequired(TrailNavError):
    """The robot has left the corridor of the current plan."""


class RefusedWaypoint(TrailNavError):
    """A commanded waypoint lies on non-traversable ground truth."""


class ParamError(TrailNavError):
    """World-generation parameters are infeasible."""


class InputError(TrailNavError):
    """Malformed caller input (e.g. unsorted trajectory timestamps)."""


class ParseError(TrailNavError):
    """A file (PLY, raster, world, config) could not be parsed."""
