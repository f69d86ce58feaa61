"""Exception types. Plain argument/domain problems raise ``ValueError``."""


class NumericalError(RuntimeError):
    """A numerical kernel (eigensolver, root polish) failed."""


class SolverError(NumericalError):
    """The Newton iteration cannot continue, e.g. singular Jacobian."""

    def __init__(self, message, condition=None):
        super().__init__(message)
        self.condition = condition


class DivergenceError(NumericalError):
    """An IVP trajectory left the physical region.

    ``sign`` is the sign of f'(tau) - 1 when integration stopped, which is
    what bisection on the wall shear needs.
    """

    def __init__(self, message, tau, sign):
        super().__init__(message)
        self.tau = tau
        self.sign = sign


class BracketError(NumericalError):
    """The shooting bracket does not straddle a root."""

    def __init__(self, message, low_mismatch, high_mismatch):
        super().__init__(message)
        self.low_mismatch = low_mismatch
        self.high_mismatch = high_mismatch
