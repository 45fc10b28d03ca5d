"""Exception hierarchy shared by all modules.

Every failure names the offending datum (row, word, entry) so CLI
diagnoses stay actionable.
"""


class FullShiftError(Exception):
    """Base class for all domain errors raised by this package."""


class NotEssential(FullShiftError):
    """The matrix has a zero row or zero column."""


class NotIrreducible(FullShiftError):
    """Some state cannot reach some other state."""


class ConditionIFails(FullShiftError):
    """The matrix is a permutation matrix; the shift space is finite."""


class InadmissibleWord(FullShiftError):
    """A word violates the transition matrix."""


class MatrixMismatch(FullShiftError):
    """Operands were built over different transition matrices."""


class RowMismatch(FullShiftError):
    """A table entry's image ends in a symbol with a different follower row."""


class ImagesOverlap(FullShiftError):
    """Two image cylinders of a table intersect."""


class ImagesDontCover(FullShiftError):
    """The image cylinders of a table fail to cover the shift space."""


class BadDomain(FullShiftError):
    """The domain of a table is not exactly the set of depth-L words."""


class NotInvariant(FullShiftError):
    """The map does not carry the given clopen set onto itself."""


class NotDisjoint(FullShiftError):
    """Two clopen sets required to be disjoint intersect."""


class NotAWitness(FullShiftError):
    """A supplied map does not satisfy the property it was claimed to."""


class BadInput(FullShiftError):
    """An argument violates a construction's stated precondition."""


class EmptyInput(FullShiftError):
    """A construction received an empty set where a nonempty one is required."""


class PreconditionFailed(FullShiftError):
    """A named precondition of an operation does not hold."""


class SearchLimitExceeded(FullShiftError):
    """A bounded search hit its cap; with validated inputs this is a bug."""
