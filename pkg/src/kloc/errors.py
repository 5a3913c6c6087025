"""Exception hierarchy shared by all kloc modules."""


class KlocError(Exception):
    """Base class for every error raised by this package."""


class InfiniteCokernel(KlocError):
    """A relation matrix does not present a finite group."""


class MissingCharacter(KlocError):
    pass


class NotPGroup(KlocError):
    pass


class PolynomialSyntaxError(KlocError):
    pass


class NotMonic(KlocError):
    pass


class Reducible(KlocError):
    pass


class DegreeZero(KlocError):
    pass


class FieldMismatch(KlocError):
    pass


class PrecisionExhausted(KlocError):
    """Floating point precision was too low to certify a numerical decision."""


class EffortExceeded(KlocError):
    """A configured effort cap (degree, discriminant, search size) was hit."""


class OutOfTheoremScope(KlocError):
    """The request lies outside the range where the splitting criterion holds
    (p = 2 with an exceptional base field)."""


class EvenIndex(KlocError):
    pass
