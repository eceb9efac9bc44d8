"""Exception hierarchy shared across the package."""


class TreepenError(Exception):
    """Base class for all errors raised by treepen."""


class DataError(TreepenError, ValueError):
    """Input data cannot be ingested or does not fit the model."""


class KindMismatch(TreepenError, ValueError):
    """Statistics or trees of one task kind were used with another."""


class DegenerateChild(TreepenError, ValueError):
    """A split leaves one child node empty."""


class ZeroDenominator(TreepenError, ArithmeticError):
    """The parent node is already pure for the chosen criterion."""


class DimensionMismatch(DataError):
    pass
