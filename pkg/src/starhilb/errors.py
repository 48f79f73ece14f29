"""Exception hierarchy shared by every module."""


class StarHilbError(Exception):
    pass


class DomainMismatch(StarHilbError, ValueError):
    """Morphisms (or a morphism and an argument) are not composable/comparable."""


class IndexOutOfRange(StarHilbError, IndexError):
    pass


class ShapeMismatch(StarHilbError, ValueError):
    pass


class ShapeNotFactorable(StarHilbError, ValueError):
    pass


class NotOrthonormal(StarHilbError, ValueError):
    pass


class NotNormalized(StarHilbError, ValueError):
    pass


class ResidualNaN(StarHilbError, ArithmeticError):
    pass


class ConfigInvalid(StarHilbError, ValueError):
    exit_code = 2


class CheckFailed(StarHilbError):
    exit_code = 1


class IoError(StarHilbError, OSError):
    exit_code = 3
