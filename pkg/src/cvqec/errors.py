"""Exception types shared across the package."""


class DimensionMismatchError(ValueError):
    """Operands do not share a compatible mode count or shape."""


class NotSymplecticError(ValueError):
    """A matrix fails the symplectic-form preservation test."""


class DecompositionError(ValueError):
    """A subspace decomposition cannot be performed on the given input."""


class BuildVerificationError(RuntimeError):
    """Internal consistency checks failed while assembling a code."""


class DecodeError(RuntimeError):
    """Base class for syndrome-decoding failures."""


class AmbiguousSyndromeError(DecodeError):
    """Two error hypotheses explain the syndrome equally well."""


class UncorrectableSyndromeError(DecodeError):
    """No hypothesis in the supported error class explains the syndrome."""


class InvalidStateError(RuntimeError):
    """A Gaussian state violates a physicality requirement."""


class CircuitVerificationError(RuntimeError):
    """A compiled circuit does not reproduce its target transformation."""
