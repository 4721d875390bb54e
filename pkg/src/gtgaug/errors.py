"""Exception types raised across the package."""


class GtgError(Exception):
    """Base class for all errors raised by gtgaug."""


class DuplicateId(GtgError, ValueError):
    pass


class UnknownId(GtgError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class MalformedRow(GtgError, ValueError):
    def __init__(self, row, message="ragged row"):
        self.row = row
        super().__init__(f"row {row}: {message}")


class MalformedFeature(GtgError, ValueError):
    def __init__(self, row, message="non-numeric or non-finite feature"):
        self.row = row
        super().__init__(f"row {row}: {message}")


class DegenerateCatalog(GtgError, ValueError):
    pass


class DegenerateClass(GtgError, ValueError):
    pass


class WriteError(GtgError, OSError):
    pass


class MissingMetric(GtgError, KeyError):
    def __str__(self):
        return Exception.__str__(self)


class InvalidK(GtgError, ValueError):
    pass


class EmptyPrior(GtgError, ValueError):
    pass


class MaskConflict(GtgError, ValueError):
    pass


class NoSeeds(GtgError, ValueError):
    pass


class ShapeError(GtgError, ValueError):
    pass


class EmptyEval(GtgError, ValueError):
    pass


class InvalidReference(GtgError, ValueError):
    pass
