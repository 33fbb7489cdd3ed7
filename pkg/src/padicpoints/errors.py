"""Exception types shared across the package.

Every failure mode that a caller is expected to catch has its own class;
anything else is a plain bug and raises AssertionError/ValueError.
"""


class PadicError(Exception):
    """Base class for all structured errors raised by this package."""


class PrimeMismatch(PadicError):
    """Two p-adic values with different primes met in one operation."""


class PrecisionExhausted(PadicError):
    """An operation left zero significant digits."""


class NotAUnit(PadicError):
    """A p-adic unit was required (valuation 0) but not supplied."""


class NotASquare(PadicError):
    """Square root requested of a non-square."""


class TruncationUnderflow(PadicError):
    """A series operation needed coefficients beyond the truncation order."""


class InsufficientPrecision(PadicError):
    """Known digits do not determine the requested answer.

    Callers (in particular the CLI retry loop) treat this as "recompute at
    higher precision", never as a hard failure.
    """


class RingMismatch(PadicError):
    """Operands live over different coefficient rings."""


class SingularAtPrecision(PadicError):
    """A matrix was not invertible at the working precision."""


class BadReduction(PadicError):
    """The curve does not have good reduction at the requested prime."""


class EndpointsInDifferentDisks(PadicError):
    """A disk-local integral was requested across residue disks."""


class WeierstrassDiskPresent(PadicError):
    """The Frobenius lift does not extend: f has a root mod p."""


class RankDeficient(PadicError):
    """The matrix of generator integrals has rank below the stated rank."""


class TrivialClass(PadicError):
    """The Hecke operator is scalar, so no nontrivial class is available."""


class ResidueSystemSingular(PadicError):
    """The residue-matching system of the filtration solve is singular."""


class SpanDeficient(PadicError):
    """The supplied rational points do not span the equivariant tensor space.

    The fallback via heights on the Jacobian is out of scope, so this is
    terminal for a run.
    """


class GeneratorMatrixSingular(PadicError):
    """The generator-integral matrix is singular at the working precision."""
