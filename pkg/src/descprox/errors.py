class DescproxError(Exception):
    """Base class for all errors raised by descprox."""


class DomainError(DescproxError, ValueError):
    """An object lies outside the declared domain of a probe or map."""


class PreconditionError(DescproxError, ValueError):
    """An operation was called with arguments violating its precondition."""


class UnsupportedError(DescproxError):
    """The requested computation is undefined for the given representation."""


class ConfigurationError(DescproxError, ValueError):
    """A configuration file, literal or instance is malformed or inconsistent."""


class ShapeError(DescproxError, ValueError):
    """An image has the wrong shape for the requested operation."""


class PPMError(DescproxError, ValueError):
    """Malformed binary PPM stream.  ``offset`` is the byte where parsing failed."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset
