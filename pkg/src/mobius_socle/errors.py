"""Exception types shared across the library.

Two base classes matter for callers: InputError (bad arguments, malformed
text, violated preconditions) and CapExceeded (a configurable resource cap
was hit).  The CLI maps them to exit codes 2 and 3 respectively.
"""


class InputError(ValueError):
    """Invalid input or violated precondition."""


class CapExceeded(RuntimeError):
    """A configurable enumeration/order cap was exceeded."""


class AntisymmetryViolation(InputError):
    """Relation closure produced x <= y <= x for distinct x, y."""


class PosetMismatch(InputError):
    """Incidence functions over different posets were combined."""


class NotInvertible(InputError):
    """Incidence function has a zero diagonal entry."""


class NonUnitDiagonal(InputError):
    """Diagonal entry outside {+1, -1}; exact integer inversion impossible."""


class NoBounds(InputError):
    """Poset lacks a unique minimum or unique maximum."""


class NotALattice(InputError):
    """A queried meet or join does not exist or is not unique."""


class ComparableComplements(InputError):
    """Two distinct complements are comparable; modular Crapo form invalid."""


class NotPrime(InputError):
    """An integer required to be prime is not."""


class ParseError(InputError):
    """Malformed group or socle expression."""


class UnknownSimpleGroup(InputError):
    """Simple-group name not present in the loaded table."""


class SocleSpecViolation(InputError):
    """Socle description violates a structural requirement (e.g. repeats)."""


class NotAnAutomorphism(InputError):
    """Candidate map is not a product-preserving bijection."""


class UnsupportedDegree(InputError):
    """Operation only implemented for specific small degrees."""


class OrderCapExceeded(CapExceeded):
    """Group element enumeration passed the configured order cap."""


class EnumerationCapExceeded(CapExceeded):
    """Subgroup enumeration passed the configured subgroup-count cap."""
