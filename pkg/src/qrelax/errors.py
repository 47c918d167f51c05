"""Exception hierarchy shared by every qrelax module."""


class QRelaxError(Exception):
    """Base class for all library errors."""


class DimensionError(QRelaxError, ValueError):
    """Operand shapes or qubit counts do not fit together."""


class InvalidStateError(QRelaxError, ValueError):
    """A density matrix or coherence vector is not a valid quantum state."""


class InvalidModelError(QRelaxError, ValueError):
    """A Lindblad model or control definition is malformed."""


class DomainError(QRelaxError, ValueError):
    """A scalar argument lies outside its admissible range."""


class NumericalError(QRelaxError, ArithmeticError):
    """Base class for failures of a well-posed numerical computation."""


class NotRelaxingError(NumericalError):
    """The generator A+B is singular (or too ill-conditioned) to have a unique fixed point."""

    def __init__(self, message, spectrum=None, condition_number=None):
        super().__init__(message)
        self.spectrum = spectrum
        self.condition_number = condition_number


class SingularTargetError(NumericalError):
    pass


class NotStabilizableError(NumericalError):
    pass


class DegenerateSpectrumError(NumericalError):
    pass


class NoStroboscopicFixedPointError(NumericalError):
    pass
