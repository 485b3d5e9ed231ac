"""Exception types shared by every module.

The CLI maps each class to a process exit code.
"""


class InputError(ValueError):
    """Malformed or out-of-domain input (exit code 2)."""


class ResourceError(RuntimeError):
    """An enumeration or solve would exceed its configured cap (exit code 3)."""


class NumericalError(ArithmeticError):
    """A numerical routine hit a degenerate case it cannot resolve."""


class CheckFailure(AssertionError):
    """A verification check did not hold (exit code 1)."""
