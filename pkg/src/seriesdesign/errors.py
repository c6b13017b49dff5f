"""Exception hierarchy shared by all modules."""


class SeriesDesignError(Exception):
    """Base class for numerical failures raised by this package."""


class ContractViolation(SeriesDesignError, ValueError):
    """Inputs violate a documented precondition (shape, ordering, range)."""


class DomainError(ContractViolation):
    """A time argument lies outside [0, 1]."""


class QuadratureError(SeriesDesignError, ArithmeticError):
    """An integrand produced a non-finite value at a quadrature node."""


class NotPSDError(SeriesDesignError, ArithmeticError):
    """A matrix expected to be positive semidefinite has a negative eigenvalue."""


class DegenerateKernelError(SeriesDesignError):
    """Kernel violates v != 0 or strict monotonicity of q = u / v."""


class UnderdeterminedDesignError(SeriesDesignError):
    """The design does not identify the coefficient vector."""


class OracleError(SeriesDesignError):
    """The continuous-time oracle is not defined for the given inputs."""
