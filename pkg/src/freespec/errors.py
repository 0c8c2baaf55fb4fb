"""Exception hierarchy shared by all modules."""


class FreeSpecError(Exception):
    """Base class for every error raised by freespec."""


class InvalidInput(FreeSpecError, ValueError):
    pass


class NumericFailure(FreeSpecError, ArithmeticError):
    pass


class SingularJacobian(NumericFailure):
    pass


class NoConvergence(NumericFailure):
    pass


class BracketError(FreeSpecError, ValueError):
    pass


class PoleError(FreeSpecError, ArithmeticError):
    """Evaluation point is a singularity (pole or branch cut) of the model."""


class DegenerateError(FreeSpecError, ArithmeticError):
    """A parametrization breaks down (e.g. f(s) = 0 or s = 0)."""


class DivergenceError(FreeSpecError, ArithmeticError):
    def __init__(self, message, value=None):
        super().__init__(message)
        self.value = value


class CapError(FreeSpecError, ValueError):
    pass


class ConstraintError(FreeSpecError, ValueError):
    pass


class CapacityError(FreeSpecError, MemoryError):
    pass
