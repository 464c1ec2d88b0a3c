"""Exception hierarchy.

Precondition violations on plain arguments raise ``ValueError`` directly;
the classes below mark failures that callers (notably the CLI) need to
tell apart.
"""


class ThermoQMError(Exception):
    """Base class for library-specific failures."""


class ZeroTemperatureError(ThermoQMError, ValueError):
    """Raised when a T > 0 formula is asked for T <= 0.

    T = 0 is an exact branch (E_i(T) = E_i(0)) and must be requested
    explicitly, never reached as a limit.
    """


class TailBoundError(ThermoQMError, ValueError):
    """A truncated spectrum is too short for the requested temperature."""


class ConvergenceError(ThermoQMError, RuntimeError):
    """An iteration ran out of budget.

    ``iterations`` is the budget that was spent and ``iterates`` holds the
    last values seen, when meaningful.
    """

    def __init__(self, message, iterations=None, iterates=None):
        super().__init__(message)
        self.iterations = iterations
        self.iterates = iterates


class ConsistencyError(ThermoQMError, ArithmeticError):
    """Two independent routes to the same quantity disagree."""


class UnsupportedInteractionError(ThermoQMError, ValueError):
    """Pair interactions were supplied where only V_jm = 0 is solvable."""


class ConfigError(ThermoQMError, ValueError):
    """Invalid run configuration; ``path`` locates the offending field."""

    def __init__(self, message, path=None):
        super().__init__(message if path is None else f"{path}: {message}")
        self.path = path
