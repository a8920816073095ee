"""Exception hierarchy. Each class carries the CLI exit code it maps to."""

from __future__ import annotations


class FdeError(Exception):
    exit_code = 1


class DomainError(FdeError, ValueError):
    """Argument outside the mathematical domain of a function."""

    exit_code = 2


class GridError(FdeError, ValueError):
    """A point that must lie on the collocation grid does not."""

    exit_code = 2


class ConfigError(FdeError, ValueError):
    """Invalid problem configuration; ``errors`` holds one message per field."""

    exit_code = 2

    def __init__(self, errors: list[str] | str):
        if isinstance(errors, str):
            errors = [errors]
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class SingularParameterError(FdeError, ValueError):
    """mu * rho**2 == 2, where the boundary-value problem has no Green representation."""

    exit_code = 3


class EvaluationError(FdeError, ArithmeticError):
    """A right-hand side or iterate produced a non-finite value."""

    exit_code = 1


class DivergenceError(FdeError, RuntimeError):
    exit_code = 4

    def __init__(self, message: str, history: list[float]):
        super().__init__(message)
        self.history = list(history)


class StabilityConditionError(FdeError, ValueError):
    """G * L >= 1, so the Hyers-Ulam constant G0 is undefined."""

    exit_code = 5
