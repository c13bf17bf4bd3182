"""Exact indistinguishability analysis of the one-qubit cipher.

Everything here is computed on density matrices; nothing is sampled.

The cipher's action on the message qubit for fixed (theta, r) is the unitary
conjugation E(rho) = H^theta_r rho (H^theta_r)^dagger. Because conjugation keeps
the spectrum, the trace distance of E(rho) to I/2 is (lambda_max - lambda_min)/2,
which for a message operator of min-entropy t equals 1/2 (2^{1-t} - 1). The
same expression is the entropic-indistinguishability bound.

The IND channel applies the encryption to the message half of a
message/environment state and prepends the key qubit c0, so its output lives
on (c0, message, environment).
"""

import logging
import math
from dataclasses import dataclass
from typing import FrozenSet, Optional

import numpy as np

from src.exceptions import DimensionError, DomainError
from src.qubit import (
    DensityMatrix,
    PureState,
    check_bit,
    partial_trace,
    tensor,
    trace_distance,
)
from src.xi_cipher import canonical_angle, h_map

logger = logging.getLogger(__name__)

PROBABILITY_TOL = 1e-12
MAX_CHANNEL_DIM = 8


@dataclass(frozen=True)
class MessageDistribution:
    """Distribution (gamma0, gamma1) of a one-bit message."""

    gamma0: float
    gamma1: float

    def __post_init__(self):
        if self.gamma0 < 0 or self.gamma1 < 0:
            raise ValueError(f"Probabilities must be non-negative, got ({self.gamma0}, {self.gamma1})")
        if abs(self.gamma0 + self.gamma1 - 1.0) > PROBABILITY_TOL:
            raise ValueError(f"Probabilities must sum to 1, got {self.gamma0 + self.gamma1!r}")

    @classmethod
    def from_gamma0(cls, gamma0: float) -> 'MessageDistribution':
        return cls(gamma0, 1.0 - gamma0)

    @property
    def min_entropy(self) -> float:
        """-log2(max(gamma0, gamma1)), in [0, 1]."""
        return -math.log2(max(self.gamma0, self.gamma1))

    def density(self) -> DensityMatrix:
        """The classical operator gamma0|0><0| + gamma1|1><1|."""
        return DensityMatrix.diagonal([self.gamma0, self.gamma1])


@dataclass(frozen=True)
class ChannelOutput:
    """A channel output state with the parameters it was computed at.

    Attributes:
        state: Output density matrix.
        theta: Equatorial angle used.
        averaged_over: Which of the cipher's bits ('r', 's') were averaged.
    """

    state: DensityMatrix
    theta: float
    averaged_over: FrozenSet[str]


def _conjugate(u: np.ndarray, rho: np.ndarray) -> np.ndarray:
    return u @ rho @ u.conj().T


def _cipher_qubit(theta: float, r: int, b: int) -> np.ndarray:
    """H^theta_r|b><b|(H^theta_r)^dagger as a raw matrix."""
    return _conjugate(h_map(theta, r).entries, DensityMatrix.from_pure(PureState.basis(b)).entries)


def xi_superoperator(theta: float, r: int, rho: DensityMatrix) -> DensityMatrix:
    """Apply E(rho) = H^theta_r rho (H^theta_r)^dagger to a one-qubit state.

    Raises:
        DimensionError: If rho is not 2x2.
    """
    check_bit(r, 'r')
    if rho.dim != 2:
        raise DimensionError(f"The cipher acts on one qubit, got dimension {rho.dim}")
    return DensityMatrix(_conjugate(h_map(theta, r).entries, rho.entries))


def entropic_bound(t: float) -> float:
    """Indistinguishability bound 1/2 (2^{1-t} - 1) for min-entropy t.

    Raises:
        DomainError: If t lies outside [0, 1].
    """
    if not 0.0 <= t <= 1.0:
        raise DomainError(f"Min-entropy must lie in [0, 1], got {t!r}")
    return 0.5 * (2.0 ** (1.0 - t) - 1.0)


def min_entropy(rho: DensityMatrix) -> float:
    """Min-entropy -log2(lambda_max) of a density operator, clipped to [0, log2(dim)]."""
    value = -math.log2(float(rho.eigenvalues()[-1]))
    return min(max(value, 0.0), math.log2(rho.dim))


def is_entropically_indistinguishable(
    rho: DensityMatrix, t: float, eps: float, theta: float, r: int
) -> bool:
    """Check the (t, eps)-indistinguishability condition for one message operator.

    Operators below the min-entropy threshold t are outside the condition and
    count as satisfying it.
    """
    if min_entropy(rho) < t:
        return True
    return trace_distance(xi_superoperator(theta, r, rho), DensityMatrix.maximally_mixed(2)) <= eps


def avg_message_cipher_state(b: int, theta: float) -> DensityMatrix:
    """Average over r of the message-qubit ciphertext of bit b."""
    check_bit(b, 'b')
    return DensityMatrix(0.5 * sum(_cipher_qubit(theta, r, b) for r in (0, 1)))


def avg_joint_cipher_state(b: int, theta: float, average_s: bool, s: int = 0) -> DensityMatrix:
    """Average joint state of the ciphertext pair (c0, c1).

    Args:
        b: Plaintext bit.
        theta: Equatorial angle.
        average_s: Also average over a uniform secret bit.
        s: Secret bit used when average_s is False.

    Returns:
        A 4x4 density matrix on (c0, c1).
    """
    check_bit(b, 'b')
    secrets = (0, 1) if average_s else (check_bit(s, 's'),)
    total = np.zeros((4, 4), dtype=complex)
    for secret in secrets:
        for r in (0, 1):
            total += np.kron(_cipher_qubit(theta, r, secret), _cipher_qubit(theta, r, b))
    return DensityMatrix(total / (2 * len(secrets)))


def ind_channel(rho_me: DensityMatrix, s: int, theta: float) -> DensityMatrix:
    """IND channel (QE_s (x) 1_E) applied to a message/environment state.

    Args:
        rho_me: State whose first qubit is the message; the environment is
                empty (dim 2) or one qubit (dim 4).
        s: Secret bit.
        theta: Equatorial angle.

    Returns:
        The state on (c0, message ciphertext, environment), of twice the
        input dimension.

    Raises:
        DimensionError: If the output would exceed dimension 8.
    """
    check_bit(s, 's')
    if 2 * rho_me.dim > MAX_CHANNEL_DIM:
        raise DimensionError(f"Channel output dimension {2 * rho_me.dim} exceeds {MAX_CHANNEL_DIM}")
    env_dim = rho_me.dim // 2
    total = np.zeros((2 * rho_me.dim, 2 * rho_me.dim), dtype=complex)
    for r in (0, 1):
        local = np.kron(h_map(theta, r).entries, np.eye(env_dim))
        total += np.kron(_cipher_qubit(theta, r, s), _conjugate(local, rho_me.entries))
    return DensityMatrix(total / 2)


def ind_channel_s_averaged(rho_me: DensityMatrix, theta: float) -> ChannelOutput:
    """IND channel output averaged over a uniform secret bit."""
    state = DensityMatrix(0.5 * sum(ind_channel(rho_me, s, theta).entries for s in (0, 1)))
    return ChannelOutput(state=state, theta=canonical_angle(theta), averaged_over=frozenset({'r', 's'}))


def bell_state() -> DensityMatrix:
    """The maximally entangled message/environment state (|00> + |11>)/sqrt(2)."""
    v = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    return DensityMatrix(np.outer(v, v.conj()))


def classical_channel_gap(b: int, theta: float, env: Optional[DensityMatrix] = None) -> float:
    """Trace distance between s-averaged outputs for |b><b| (x) env and |0><0| (x) env."""
    env = env if env is not None else DensityMatrix.maximally_mixed(2)
    message = DensityMatrix.from_pure(PureState.basis(check_bit(b, 'b')))
    zero = DensityMatrix.from_pure(PureState.basis(0))
    return trace_distance(
        ind_channel_s_averaged(tensor(message, env), theta).state,
        ind_channel_s_averaged(tensor(zero, env), theta).state,
    )


def entangled_channel_gap(theta: float) -> float:
    """Trace distance between s-averaged outputs for a Bell input and |0><0| (x) rho_E.

    rho_E is the environment marginal of the Bell state. This quantity is
    reported by the analysis tables, not asserted.
    """
    rho_me = bell_state()
    rho_e = partial_trace(rho_me, (2, 2), keep=1)
    zero = DensityMatrix.from_pure(PureState.basis(0))
    gap = trace_distance(
        ind_channel_s_averaged(rho_me, theta).state,
        ind_channel_s_averaged(tensor(zero, rho_e), theta).state,
    )
    logger.debug(f"Entangled-environment channel gap at theta={theta:.6f}: {gap:.6f}")
    return gap


def bound_gap(gamma0: float, theta: float, r: int) -> float:
    """|trace distance of E(diag(gamma0, gamma1)) to I/2 - entropic_bound(t)|."""
    dist = MessageDistribution.from_gamma0(gamma0)
    computed = trace_distance(
        xi_superoperator(theta, r, dist.density()), DensityMatrix.maximally_mixed(2)
    )
    return abs(computed - entropic_bound(dist.min_entropy))
