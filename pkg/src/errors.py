"""Error and warning hierarchy shared by every subsystem."""

from typing import Optional, Tuple


class RezquError(Exception):
    """Base class for all workbench errors."""


class InvalidArgumentError(RezquError, ValueError):
    """A precondition on an argument was violated."""


class ConfigError(RezquError):
    """Experiment configuration failed validation."""

    def __init__(self, key_path: str, message: str):
        self.key_path = key_path
        super().__init__(f"{key_path}: {message}" if key_path else message)


class NumericalError(RezquError):
    """A numerical procedure failed or became ill-posed."""


class LabelingError(NumericalError):
    """Eigenstates could not be assigned to bare states unambiguously."""

    def __init__(self, message: str, pair: Tuple = (), overlap: float = float('nan')):
        self.pair = tuple(pair)
        self.overlap = overlap
        super().__init__(message)


class DegenerateDetuningError(NumericalError, ZeroDivisionError):
    """A detuning entering a perturbative denominator is zero."""


class PoleError(NumericalError):
    """A closed-form estimate was evaluated on its pole."""


class StepSizeError(NumericalError):
    """Integration drifted beyond tolerance; refine the time step."""

    def __init__(self, message: str, drift: float = float('nan'), dt: Optional[float] = None):
        self.drift = drift
        self.dt = dt
        super().__init__(message)


class DesignFailure(NumericalError):
    """Pulse design root finding did not converge."""

    def __init__(self, message: str, residual: float = float('nan')):
        self.residual = residual
        super().__init__(message)


class ExceptionalPointError(NumericalError):
    """Non-Hermitian eigenvectors coalesce."""

    def __init__(self, message: str, condition: float = float('inf')):
        self.condition = condition
        super().__init__(message)


class RezquWarning(UserWarning):
    """Base class for non-fatal diagnostics."""


class NearDegeneracyWarning(RezquWarning):
    """Detunings too small for the perturbative series to be trusted."""


class ValidityWarning(RezquWarning):
    """A leading-order approximation is used outside its validity range."""


class OptimizerStagnationWarning(RezquWarning):
    """Optimizer stopped above its error target."""
