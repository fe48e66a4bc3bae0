"""Exception hierarchy.

Every failure mode that callers are expected to distinguish gets its own
class; generic misuse raises the stdlib types (TypeError/ValueError)
directly.
"""


class ZgError(Exception):
    """Base class for all package-specific errors."""


class UnsupportedInputError(ZgError):
    """Input outside the supported domain (wrong parity, too small, ...)."""


class DataInconsistencyError(ZgError):
    """Internally contradictory data (negative height, bad block row, ...)."""


class AmbiguousBlockError(ZgError):
    """A block-member selection rule did not pin down a unique character."""


class MissingBlockDataError(ZgError):
    """Block information was requested from a table that carries none."""


class OrderShapeError(ZgError):
    """A constraint provider was used at a unit order it does not cover."""


class IngestError(ZgError):
    """Base class for table-file validation failures."""


class SchemaError(IngestError):
    """Malformed document structure or missing/ill-typed fields."""


class TableShapeError(IngestError):
    """Non-square table or class sizes not summing to the group order."""


class OrthogonalityError(IngestError):
    """Character rows failing the exact orthogonality relations."""


class PowerMapError(IngestError):
    """Power maps pointing at missing classes or violating order rules."""


class CyclotomicFormatError(IngestError):
    """Unparseable serialized cyclotomic value."""


class BlockDataError(IngestError):
    """Supplied block data is internally inconsistent."""


class PrecisionMismatchError(ZgError):
    """Arithmetic between truncated 2-adic values of different precision."""


class SamplingFailureError(ZgError):
    """An involution sampler exhausted its retry budget."""
