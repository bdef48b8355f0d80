"""Exception hierarchy shared across the package.

The CLI maps these onto exit codes: InvalidInputError -> 1,
UnsupportedInstanceError -> 2, NumericalError -> 3.
"""


class QfrError(Exception):
    """Base class for all package errors."""


class InvalidInputError(QfrError):
    """Malformed or inconsistent user input (shapes, signs, ranges)."""


class UnsupportedInstanceError(QfrError):
    """The instance is valid but outside the theory this code implements.

    Examples: tail-limit requests for a ratio whose largest pencil
    eigenvalue does not vanish at the support edge, or a degenerate ratio.
    """


class NumericalError(QfrError):
    """A numerical routine failed to converge or lost integrability."""
