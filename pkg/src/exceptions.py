"""Exceptions raised by the simulator, the scheme and the game harness.

The CLI maps each of these to an exit code (see src/main.py).
"""

from typing import Any, Optional


class QfeError(Exception):
    """Base class for all simulator errors."""


class AmbiguousStateError(QfeError):
    """A deterministic measurement found no outcome with probability ~1.

    Raised when a decryptor applies the wrong inverse, e.g. decrypts under
    an angle that does not match the ciphertext.
    """

    def __init__(self, p0: float, p1: float, tol: float):
        self.p0 = p0
        self.p1 = p1
        self.tol = tol
        super().__init__(
            f"Ambiguous computational-basis state: p0={p0:.6g}, p1={p1:.6g} (tol={tol:g})"
        )


class NonUnitaryError(QfeError, ValueError):
    """A matrix passed as a unitary exceeds the unitarity defect tolerance."""


class DimensionError(QfeError, ValueError):
    """Matrix dimensions are unsupported or do not match."""


class DomainError(QfeError, ValueError):
    """A real-valued argument lies outside the operation's domain."""


class AlephKeyError(QfeError, ValueError):
    """The aleph key was passed to KeyGen, which has no aleph branch."""


class ResampleExhaustedError(QfeError):
    """Setup could not draw a boundary-consistent secret within its limit."""


class BudgetExhaustedError(QfeError):
    """An adversary exceeded its oracle query budget."""


class ParseError(QfeError, ValueError):
    """A serialized record or command-line value could not be parsed."""


class InvalidAdversaryError(QfeError):
    """A game query violates the adversary validity condition.

    Attributes:
        query: The offending query, as recorded in the transcript.
    """

    def __init__(self, message: str, query: Optional[Any] = None):
        self.query = query
        super().__init__(message if query is None else f"{message}: {query!r}")
