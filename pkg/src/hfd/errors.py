"""Exception classes shared across the package.

Each class carries the CLI exit status it maps to.
"""


class HFDError(Exception):
    exit_code = 1


class DimensionError(HFDError, ValueError):
    """Operands live in ambient groups of different rank."""

    exit_code = 2


class DomainError(HFDError, ValueError):
    """An element was expected to lie in a subgroup and does not."""

    exit_code = 2


class PreconditionError(HFDError, ValueError):
    exit_code = 2


class InputError(HFDError, ValueError):
    exit_code = 2


class ValidationError(HFDError):
    exit_code = 2

    def __init__(self, report):
        self.report = report
        super().__init__("; ".join(report.failures) or "invalid model")


class CapacityError(HFDError):
    exit_code = 2


class UncertifiedError(HFDError):
    exit_code = 3


class InvariantViolation(HFDError, AssertionError):
    """An identity that must hold by construction failed. Always a bug or a bad model."""

    exit_code = 4
