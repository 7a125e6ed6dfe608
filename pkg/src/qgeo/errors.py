"""Exception types shared across the package."""


class QgeoError(ValueError):
    """Base class for all domain errors raised by this package."""


class NotHermitian(QgeoError):
    pass


class DomainError(QgeoError):
    """Matrix function applied outside its eigenvalue domain."""


class OutOfBall(QgeoError):
    pass


class WrongLevel(QgeoError):
    pass


class WrongLength(QgeoError):
    pass


class NotFaithful(QgeoError):
    pass


class SecondArgNotFaithful(QgeoError):
    pass


class SiteIsPure(QgeoError):
    pass


class NotPure(QgeoError):
    pass


class NotOnSphere(QgeoError):
    pass


class DimMismatch(QgeoError):
    pass


class DimTooSmall(QgeoError):
    pass


class NotTracePreserving(QgeoError):
    def __init__(self, deviation: float):
        self.deviation = float(deviation)
        super().__init__(f"Kraus sum deviates from identity by {deviation:.3e}")


class NotCompletable(QgeoError):
    pass


class EmptyMesh(QgeoError):
    pass


class Degenerate(QgeoError):
    pass


class SubsolverFailed(QgeoError):
    pass


class TooManyBoundary(QgeoError):
    pass
