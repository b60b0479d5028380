"""Exception hierarchy."""


class FintopError(Exception):
    """Base class for all errors raised by fintop."""


class ShapeError(FintopError):
    """An argument has the wrong shape (e.g. not a tagged product)."""


class PreconditionError(FintopError):
    """A documented precondition of an operation does not hold."""


class ResourceError(FintopError):
    """An enumeration exceeded its configured cap."""


class InputError(FintopError):
    """A serialized document is malformed."""

    def __init__(self, message, location=None):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)
