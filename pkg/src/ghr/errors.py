"""Exception hierarchy shared by every ghr module."""


class GhrError(Exception):
    """Base class for all errors raised by ghr."""


class InsufficientOrder(GhrError):
    """A conversion asked for more moments or cumulants than were supplied."""


class InsufficientMoments(GhrError):
    """A bound quantity needs higher moments than the sequence provides."""


class InvalidMoments(GhrError):
    """The sequence cannot be the central moments of a probability law."""


class InvalidSpec(GhrError):
    """A distribution or model specification is malformed."""


class DegenerateDenominator(GhrError):
    """A determinant used as a divisor vanished."""


class DegenerateFrame(GhrError):
    """An orthogonalized derivative vector vanished, so later terms are undefined."""


class NonHermitian(GhrError):
    """An observable or Hamiltonian is not Hermitian."""
