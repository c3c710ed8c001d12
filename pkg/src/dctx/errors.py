"""Exception hierarchy. Everything derives from ``ValueError`` so callers
that only care about bad input can catch that."""


class DctxError(ValueError):
    pass


class NotHermitian(DctxError):
    pass


class InvalidState(DctxError):
    pass


class NegativeTime(DctxError):
    pass


class DimensionMismatch(DctxError):
    pass


class NotAProjector(DctxError):
    pass


class DegenerateConfiguration(DctxError):
    pass


class OutOfRange(DctxError):
    pass
