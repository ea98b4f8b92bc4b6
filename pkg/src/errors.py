class GaloisDualityError(Exception):
    """Base class for every error raised by the library."""


class SortError(GaloisDualityError):
    pass


class GroupError(GaloisDualityError):
    pass


class SortingError(GaloisDualityError):
    pass


class CompleteSystemError(GaloisDualityError):
    pass


class UnsupportedTargetError(CompleteSystemError):
    """An existential demand points at a sort the system does not declare."""


class DualityError(GaloisDualityError):
    pass


class ModelError(GaloisDualityError):
    pass


class StructureFormatError(GaloisDualityError):
    def __init__(self, message: str, location: str = "$"):
        super().__init__(f"{location}: {message}")
        self.location = location
