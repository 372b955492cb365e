"""Exception types shared across the package."""


class GroupWalkError(Exception):
    """Base class for all errors raised by groupwalk."""


class InvalidParameterError(GroupWalkError, ValueError):
    """An argument violates a documented precondition."""


class CapacityExceededError(GroupWalkError):
    """A construction would enumerate more elements than the configured cap."""


class NotGeneratingError(GroupWalkError):
    """The given set does not generate the group in the required sense."""


class UnsupportedWalkError(GroupWalkError):
    """The operation needs a property (e.g. a symmetric step law) the walk lacks."""


class ScanCapExceededError(GroupWalkError):
    """A search exceeded its configured scan cap before terminating."""
