"""Exception hierarchy shared by every irsim module."""


class IrsimError(Exception):
    """Base class for all irsim errors."""


class InvalidConfigError(IrsimError, ValueError):
    """A component value or model parameter is out of its valid domain."""


class InfeasibleTargetError(IrsimError, ValueError):
    """A design target cannot be met with positive component values."""


class InsufficientHeadroomError(IrsimError, ValueError):
    """Supply voltage does not exceed the LED string's forward drop."""


class InvalidStimulusError(IrsimError, ValueError):
    """Input event lists are unsorted, overlapping or otherwise malformed."""


class InvalidPathError(IrsimError, ValueError):
    """An optical path has a nonpositive length or bad reflectance."""


class ScenarioConfigError(IrsimError, ValueError):
    """A scenario description failed validation.

    ``field`` names the offending key (dotted path) when known.
    """

    def __init__(self, message, field=None):
        super().__init__(message)
        self.field = field
