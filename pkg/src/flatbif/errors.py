"""Exception types shared across the package.

Every error that maps to a CLI exit code lives here so the frontend can
dispatch on type alone.
"""


class FlatbifError(Exception):
    """Base class for all package errors."""


class InvalidInput(FlatbifError):
    """An argument violates a documented precondition."""


class InvalidLattice(InvalidInput):
    """Basis matrix is singular or otherwise not a lattice basis."""


class InvalidGroup(InvalidInput):
    """A crystallographic group value failed validation."""


class NotIsometricAction(InvalidInput):
    """Conjugating matrix lies outside the compatibility cone of the group."""


class IrreducibleUnexpected(FlatbifError):
    """No rational invariant splitting was found within the seed budget."""


class EnumerationOverflow(FlatbifError):
    """An enumeration exceeded its configured count limit."""


class Unsupported(FlatbifError):
    """Requested computation is outside the supported parameter range."""


class NonIntegerMultiplicity(FlatbifError):
    """A character sum failed to round to an integer; indicates a
    sign-convention bug and must abort rather than round silently."""


class IncompleteInput(FlatbifError):
    """A spectrum slice does not certify completeness far enough."""


class UndecidableComparison(FlatbifError):
    """A certified comparison could not be decided at the configured
    precision.  Raise the precision or treat as a hard failure."""


class NonPositiveScal(InvalidInput):
    """Combined scalar curvature is not positive for the given scaling."""


class GridTooCoarse(FlatbifError):
    """Index-jump isolation exhausted its refinement budget."""


class ScenarioError(InvalidInput):
    """A scenario file failed to parse or validate."""
