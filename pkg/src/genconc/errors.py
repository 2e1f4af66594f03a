"""Exception hierarchy. The CLI maps each class to an exit code."""


class GenconcError(Exception):
    exit_code = 1


class ShapeError(GenconcError, ValueError):
    """Array sizes or site indices inconsistent with the declared system."""

    exit_code = 2


class ValidationError(GenconcError, ValueError):
    """Input fails a normalization, positivity or format check."""

    exit_code = 2


class ParameterError(GenconcError, ValueError):
    exit_code = 2


class KindError(GenconcError, ValueError):
    """State violates the (anti)symmetry or support required by its kind."""

    exit_code = 3


class CapError(GenconcError, MemoryError):
    """Dense materialization would exceed the configured dimension cap."""

    exit_code = 4


class IntegrityError(GenconcError, ArithmeticError):
    """A quantity that must be nonnegative came out clearly negative."""

    exit_code = 5
