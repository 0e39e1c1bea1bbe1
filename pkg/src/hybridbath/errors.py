"""Exception hierarchy shared by the library and the command line."""


class HybridBathError(Exception):
    """Base class for all errors raised by hybridbath."""

    exit_code = 1
    kind = "error"


class InvalidArgumentError(HybridBathError, ValueError):
    exit_code = 2
    kind = "invalid-argument"


class ConfigError(HybridBathError, ValueError):
    """A configuration document is missing a field or has a bad value.

    ``field`` is the dotted path of the offending entry, e.g. ``grid.dt``.
    """

    exit_code = 2
    kind = "config"

    def __init__(self, field, message):
        self.field = field
        self.message = message
        super().__init__(f"{field}: {message}")


class SingularityError(HybridBathError, ArithmeticError):
    """A coefficient function diverged (e.g. the resonant tangent law)."""

    exit_code = 3
    kind = "singularity"

    def __init__(self, time, quantity="coefficient", magnitude=float("inf")):
        self.time = float(time)
        self.quantity = quantity
        self.magnitude = magnitude
        super().__init__(
            f"{quantity} diverged at t={self.time:.17g} (|value|={magnitude:.3g})")


class ResourceError(HybridBathError, RuntimeError):
    exit_code = 4
    kind = "resource"


class IntegrationError(HybridBathError, RuntimeError):
    """Numerical integration violated a conservation guard."""

    exit_code = 5
    kind = "integration"
