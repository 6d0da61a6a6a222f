"""Exception types shared across the package."""


class QubofpError(Exception):
    """Base class for all qubofp errors."""


class FormatError(QubofpError):
    """Input data violates the dataset contract."""


class AugmentError(QubofpError):
    """Complement augmentation applied to an already-augmented dataset."""


class RangeError(QubofpError):
    """A count or index parameter is outside its allowed range."""


class EmptySelectionError(QubofpError):
    """A fingerprint set with no selected columns was used where one is required."""


class ShapeError(QubofpError):
    """Array arguments have mismatched shapes."""


class DegenerateError(QubofpError):
    """The requested statistic is undefined for this input."""


class TooLargeError(QubofpError):
    """Problem too large for exhaustive enumeration."""


class BudgetError(QubofpError):
    """Enumeration would exceed the configured candidate budget."""


class EmptyInputError(QubofpError):
    """An operation requiring at least one element received none."""


class IoError(QubofpError):
    """Report files could not be written."""
