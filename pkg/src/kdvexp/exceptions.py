"""
Exceptions for kdvexp.
"""

from typing import Optional, Union


class KdvError(ValueError):
    """
    Raised whenever an internal condition isn't met.
    """

    pass


class ConfigError(KdvError):
    """
    Raised whenever a run configuration can't be parsed or validated.
    """

    def __init__(self, message: str, *, line: Optional[Union[int, str]] = None) -> None:
        self.line = line
        if line is None:
            super().__init__(message)
        elif isinstance(line, int):
            super().__init__(f"line {line}: {message}")
        else:
            super().__init__(f"{line}: {message}")


class SymmetryError(KdvError):
    """
    Raised whenever a field that must represent a real function violates
    Hermitian symmetry.
    """

    pass


class MeanViolationError(KdvError):
    """
    Raised whenever a stepper that requires a zero-mean input is handed
    a field with a non-negligible zero mode.
    """

    pass


class GridMismatchError(KdvError):
    """
    Raised whenever two fields that must share a grid don't.
    """

    pass


class FitError(KdvError):
    """
    Raised whenever a convergence slope can't be fitted.
    """

    pass


class NumericalError(KdvError):
    """
    The base class for numerical (rather than validation) failures.
    """

    pass


class DivergenceError(NumericalError):
    """
    Raised whenever an evolution produces non-finite coefficients.
    """

    def __init__(self, message: str, *, step_index: int) -> None:
        self.step_index = step_index
        super().__init__(f"{message} (step {step_index})")


class AccuracyError(NumericalError):
    """
    Raised whenever an adaptive quadrature fails to reach its tolerance.
    """

    pass


class OracleMismatch(NumericalError):  # noqa: N818
    """
    Raised whenever a self-test suite finds a stepper disagreeing with its oracle.
    """

    pass
