"""Exception types shared across the package."""


class EvosegError(Exception):
    """Base class for all structured errors raised by this package."""


class GenotypeError(EvosegError):
    """A genotype violates a validity rule.

    ``row`` and ``col`` are 0-based matrix coordinates when the violation is
    tied to a single gene, otherwise None.
    """

    def __init__(self, message, row=None, col=None):
        if row is not None:
            message = f"{message} (row {row}, col {col})"
        super().__init__(message)
        self.row = row
        self.col = col


class InputError(EvosegError):
    """Caller-supplied data is malformed (dimension mismatch, empty dataset, ...)."""


class LoadError(EvosegError):
    """A manifest, image, or model file failed to load."""


class LibraryMismatchError(LoadError):
    """A model references a function library with a different content hash."""


class MutationStallError(EvosegError):
    """Accumulate mutation hit the round cap without changing the active graph."""
