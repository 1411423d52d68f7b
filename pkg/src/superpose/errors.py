"""Exception types raised across the package."""


class SuperposeError(Exception):
    """Base class for every error raised by this package."""


class ParameterError(SuperposeError, ValueError):
    """An argument lies outside its admissible range."""


class DimensionError(ParameterError):
    """Matrix or vector shapes are incompatible."""


class DegenerateInputError(ParameterError):
    """Input is too small for the requested quantity to be defined."""


class SingularColumnError(ParameterError):
    """A zero column (or vector) cannot be normalized."""

    def __init__(self, index, message=None):
        self.index = index
        super().__init__(message or f"column {index} has zero norm")


class NonFiniteError(ParameterError):
    """A matrix contains NaN or infinite entries."""


class EnumerationGuardError(ParameterError):
    """Instance too large for exhaustive enumeration."""


class PreconditionError(ParameterError):
    """A checked precondition of an operation does not hold."""

    def __init__(self, message, offenders=()):
        self.offenders = tuple(offenders)
        super().__init__(message)


class ContractViolation(ParameterError):
    """A caller-supplied callable breaks its contract (e.g. monotonicity)."""


class ConstructionError(SuperposeError, RuntimeError):
    """A randomized construction failed its certification within budget."""

    def __init__(self, message, achieved_mu=None):
        self.achieved_mu = achieved_mu
        super().__init__(message)


class MatrixParseError(SuperposeError):
    """A serialized matrix is malformed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
