"""Exception hierarchy shared across the package.

The CLI maps these onto its exit-code contract: resource bounds exit 3,
invalid theories exit 2, bad invocations exit 4.
"""


class GptError(Exception):
    """Base class for all package errors."""


class ClosureExceeded(GptError):
    """Group closure grew past the configured bound."""


class InvalidTheoryError(GptError):
    """Base for errors that mean the theory data itself is inconsistent."""


class InvalidTransformation(InvalidTheoryError):
    """A generator does not preserve the composite state space."""


class InvalidVertexList(InvalidTheoryError):
    """An explicit vertex list contains non-extremal points."""


class OrbitEscape(InvalidTheoryError):
    """A group element mapped a state outside the composite state space."""


class UsageError(GptError):
    """Base for errors caused by a bad request rather than bad data."""


class UnknownTheory(UsageError):
    """No builtin theory with the requested name."""


class BadParams(UsageError):
    """Parameters outside the supported range for a builtin theory."""


class UnsupportedArity(UsageError):
    """Operation not implemented for this number of parties."""


class NotExchangeEigenstate(GptError):
    """Pure state is in neither the symmetric nor the antisymmetric sector."""


class NotSymmetricState(GptError):
    """Density matrix is not swap-invariant."""


class NotIdempotent(GptError):
    """Matrix fails E·E = E within the backend's precision."""


class NotSymmetrisation(GptError):
    """Idempotent is not invariant under the party permutations."""


class DegenerateCenter(GptError):
    """Generic central element stayed spectrally degenerate after resampling."""
