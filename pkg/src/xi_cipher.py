"""One-qubit secret-key cipher over Bloch-sphere equatorial states.

A classical bit b is encrypted under a secret bit s and an equatorial angle
theta as the qubit pair (H^theta_r|s>, H^theta_r|b>) for a fresh uniform bit r,
where

    H^theta_u = 1/sqrt(2) * [[1, 1], [(-1)^u e^{i theta}, (-1)^{u+1} e^{i theta}]].

Decryption recovers r from the first qubit with (H^theta_s)^dagger, then b from
the second qubit with (H^theta_r)^dagger. Both measurements are certain, so
they are modelled with the deterministic measure_computational().
"""

import cmath
import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from src.config import MEASURE_TOL
from src.qubit import (
    PureState,
    Unitary2,
    apply,
    check_bit,
    dagger,
    measure_computational,
)

logger = logging.getLogger(__name__)

TWO_PI = 2 * math.pi
EQUATOR_TOL = 1e-12
QUBITS_PER_BIT = 2


def canonical_angle(theta: float) -> float:
    """Reduce an angle into [0, 2*pi).

    Raises:
        ValueError: If theta is not finite.
    """
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"Angle must be finite, got {theta!r}")
    reduced = theta % TWO_PI
    # x % 2pi can round up to exactly 2pi for tiny negative x
    return 0.0 if reduced >= TWO_PI else reduced


@dataclass(frozen=True)
class XiContext:
    """Secret bit and equatorial angle for one cipher position."""

    s: int
    theta: float

    def __post_init__(self):
        object.__setattr__(self, 's', check_bit(self.s, 's'))
        object.__setattr__(self, 'theta', canonical_angle(self.theta))


@dataclass(frozen=True)
class XiCiphertext:
    """The encrypted qubit pair (c0, c1); both lie on the Bloch equator."""

    c0: PureState
    c1: PureState

    def __post_init__(self):
        for name, qubit in (('c0', self.c0), ('c1', self.c1)):
            p0, p1 = qubit.probabilities()
            if abs(p0 - 0.5) > EQUATOR_TOL or abs(p1 - 0.5) > EQUATOR_TOL:
                raise ValueError(
                    f"Ciphertext component {name} is off the Bloch equator: p0={p0!r}, p1={p1!r}"
                )

    @property
    def qubit_count(self) -> int:
        return QUBITS_PER_BIT


@lru_cache(maxsize=4096)
def _h_map_cached(theta: float, u: int) -> Unitary2:
    phase = cmath.exp(1j * theta)
    sign = -1.0 if u else 1.0
    return Unitary2(np.array([
        [1.0, 1.0],
        [sign * phase, -sign * phase],
    ], dtype=complex) / math.sqrt(2))


def h_map(theta: float, u: int) -> Unitary2:
    """Return the unitary H^theta_u.

    Args:
        theta: Equatorial angle in radians (any finite value).
        u: Bit selecting the sign of the second row.

    Returns:
        The 2x2 unitary of the cipher.
    """
    return _h_map_cached(canonical_angle(theta), check_bit(u, 'u'))


def qenc_with_r(ctx: XiContext, b: int, r: int) -> XiCiphertext:
    """Encrypt bit b with the randomness r pinned."""
    check_bit(b, 'b')
    h = h_map(ctx.theta, r)
    return XiCiphertext(
        c0=apply(h, PureState.basis(ctx.s)),
        c1=apply(h, PureState.basis(b)),
    )


def qenc(ctx: XiContext, b: int, rng: np.random.Generator) -> XiCiphertext:
    """Encrypt bit b, drawing r uniformly from rng."""
    r = int(rng.integers(0, 2))
    return qenc_with_r(ctx, b, r)


def qdec(ctx: XiContext, ct: XiCiphertext, tol: float = MEASURE_TOL) -> int:
    """Decrypt a ciphertext pair.

    Args:
        ctx: Secret bit and angle the ciphertext was produced under.
        ct: Ciphertext pair.
        tol: Tolerance of the deterministic measurements.

    Returns:
        The plaintext bit.

    Raises:
        AmbiguousStateError: If the angle does not match the ciphertext.
    """
    r = measure_computational(apply(dagger(h_map(ctx.theta, ctx.s)), ct.c0), tol)
    return measure_computational(apply(dagger(h_map(ctx.theta, r)), ct.c1), tol)
