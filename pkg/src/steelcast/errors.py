"""Exception hierarchy.

The CLI maps the three base classes onto exit codes: ConfigError -> 2,
DataError -> 3, NumericalError -> 4. Everything raised by the library is a
SteelcastError so callers can catch one type.
"""


class SteelcastError(Exception):
    pass


class ConfigError(SteelcastError):
    """Invalid configuration or usage."""


class DataError(SteelcastError):
    """Input data violates a precondition."""


class NumericalError(SteelcastError):
    """A numerical procedure failed."""


class UsageError(ConfigError):
    pass


class BadFraction(ConfigError):
    pass


class BadC(ConfigError):
    pass


class BadHorizon(ConfigError):
    pass


class EmptyGrid(ConfigError):
    pass


class NoCommonPeriod(DataError):
    pass


class DuplicateName(DataError):
    pass


class ZeroVariance(DataError):
    pass


class TooShort(DataError):
    pass


class TooFewRows(DataError):
    pass


class NonPositiveOutput(DataError):
    pass


class NonPositiveInput(DataError):
    pass


class DegenerateLabels(DataError):
    pass


class SchemaError(DataError):
    pass


class ParseError(DataError):
    pass


class FrequencyError(DataError):
    pass


class InvalidState(NumericalError):
    pass


class SingularDesign(NumericalError):
    pass


class Underdetermined(NumericalError):
    pass


class ShapeError(NumericalError):
    pass


class NoConvergence(NumericalError):
    pass
