"""Exception hierarchy shared across the package."""


class RadarOcoError(Exception):
    """Base class for all package errors."""


class InvalidActionError(RadarOcoError, ValueError):
    pass


class InvalidStrategyError(RadarOcoError, ValueError):
    pass


class InvalidGradientError(RadarOcoError, ValueError):
    pass


class UnderflowError(RadarOcoError, ArithmeticError):
    pass


class ConfigurationError(RadarOcoError, ValueError):
    """Invalid or inconsistent configuration.

    ``path`` is the dotted key path (``section.key``) and ``line`` the
    1-based line in the config file, when known.
    """

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = []
        if path:
            where.append(f"key '{path}'")
        if line is not None:
            where.append(f"line {line}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)


class ActionSpaceTooLargeError(ConfigurationError):
    pass


class SimulationError(RadarOcoError, RuntimeError):
    """A trial produced a non-finite state."""
