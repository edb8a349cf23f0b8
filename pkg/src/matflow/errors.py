"""Exception types shared across the package."""


class MatflowError(Exception):
    """Base class for all errors raised by matflow."""


class DimensionMismatchError(MatflowError, ValueError):
    """Operands have incompatible matrix dimensions."""


class NonHermitianError(MatflowError, ValueError):
    """An operation requiring a Hermitian matrix received a non-Hermitian one."""


class DomainError(MatflowError, ValueError):
    """A scalar function was evaluated outside its domain (e.g. log of a
    non-positive eigenvalue)."""


class DegenerateModelError(MatflowError, ValueError):
    """The generators fail to generate the full matrix algebra: the Laplacian
    kernel has dimension > 1."""


class EigensolverError(MatflowError, RuntimeError):
    """The Jacobi sweep limit was exhausted before reaching the off-diagonal
    threshold."""


class ConfigError(MatflowError, ValueError):
    """Invalid experiment configuration.  Carries the full list of
    validation problems, not just the first one."""

    def __init__(self, problems):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
