"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent user input (files, flags, partitions)."""


class PartitionError(InputError):
    """A set family that does not partition the node set."""


class ConvergenceError(RuntimeError):
    """An iterative solver exhausted its iteration budget."""

    def __init__(self, message, iterations, residual):
        super().__init__(f"{message} (iterations={iterations}, residual={residual:.3e})")
        self.iterations = iterations
        self.residual = residual
