"""Error taxonomy for the symbol calculus.

Every failure mode that callers are expected to catch has its own class,
so tests and the CLI can map them to exit codes without string matching.
"""


class LocalsymError(Exception):
    """Base class for all library errors."""


class DivisionByZero(LocalsymError):
    """Division or inversion of an element that is zero (or zero to precision)."""


class PrecisionExhausted(LocalsymError):
    """A result would need digits beyond the known precision horizon."""


class InvalidLattice(LocalsymError):
    """Lattice data outside the representable normal-form class."""


class NonRationalCoefficient(LocalsymError):
    """A transform coefficient left Z[1/p].  Defensive; should not occur."""


class NotPiRegular(LocalsymError):
    """Virtual lattice is not pi-regular at the requested level."""


class NoConvergence(LocalsymError):
    """A fixed-point iteration failed to stabilize within its guard."""


class NotAUnit(LocalsymError):
    """Inversion of a non-unit in a ring where only units invert."""


class ZeroToPrecision(LocalsymError):
    """Leading term needed but the value is indistinguishable from zero."""


class NotInBaseField(LocalsymError):
    """A value expected in F_q((pi)) has tower digits that do not descend."""


class SupportNotDeclared(LocalsymError):
    """Integrand evaluated outside its declared support window."""


class RefinementDiverged(LocalsymError):
    """Quadrature refinement changed the value; constancy radius was wrong."""


class DigitRangeExceeded(LocalsymError):
    """A digit expansion exceeded the configured range."""


class NonIntegerExponent(LocalsymError):
    """An exponent expected in Z (or Z[1/p]) is not."""


class RootDoesNotExist(LocalsymError):
    """Requested p-th root is not in the ring."""
