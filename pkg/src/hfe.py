"""Hybrid functional encryption over the one-qubit cipher.

The scheme lets the holder of designated key kappa_q learn exactly the first q
bits of a Q-bit message (or, with a position permutation eta, the bits at
positions eta(1), ..., eta(q)).

The master secret is never a full table of the injection sigma from
lambda-bit keys to Q-bit strings. It is stored in the efficient form

    [[a]] = (sigma(kappa_Q), kappa_1, ..., kappa_Q)

where s = sigma(kappa_Q) doubles as the per-position secret bits s_1..s_Q.
The key of rank q is the one whose image sits at integer offset delta_q below
s (see delta_table()). Every other key maps to an image that hits no offset,
so KeyGen returns the all-bottom key for it.

Bitstrings are Python str objects over '0'/'1', read as big-endian unsigned
integers wherever an integer is needed.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Optional, Sequence, Union

import numpy as np

from src.config import RESAMPLE_LIMIT
from src.exceptions import AlephKeyError, ResampleExhaustedError
from src.xi_cipher import XiCiphertext, XiContext, canonical_angle, qdec, qenc_with_r

logger = logging.getLogger(__name__)

MAX_MESSAGE_LENGTH = 2 ** 20
# Below this key length, distinct keys are drawn without replacement directly.
_DIRECT_KEY_SAMPLING_BITS = 20


def check_bitstring(bits: str, length: Optional[int] = None, name: str = 'bitstring') -> str:
    """Validate a '0'/'1' string, optionally of a fixed length.

    Raises:
        ValueError: On foreign characters or a length mismatch.
    """
    if not isinstance(bits, str) or any(ch not in '01' for ch in bits):
        raise ValueError(f"{name} must be a string of 0/1 characters, got {bits!r}")
    if length is not None and len(bits) != length:
        raise ValueError(f"{name} must have length {length}, got {len(bits)}")
    return bits


def _random_bits(rng: np.random.Generator, n: int) -> str:
    return ''.join('1' if x else '0' for x in rng.integers(0, 2, size=n))


@dataclass(frozen=True)
class SchemeParams:
    """Security parameter lam (key length) and message length Q."""

    lam: int
    Q: int

    def __post_init__(self):
        if self.lam < 1 or self.Q < 1:
            raise ValueError(f"lambda and Q must be positive, got lambda={self.lam}, Q={self.Q}")
        if self.Q < self.lam:
            raise ValueError(f"Q must be at least lambda, got Q={self.Q} < lambda={self.lam}")
        if self.Q > MAX_MESSAGE_LENGTH:
            raise ValueError(f"Q must not exceed {MAX_MESSAGE_LENGTH}, got {self.Q}")
        if self.Q > 2 ** min(self.lam, 64):
            raise ValueError(
                f"lambda={self.lam} leaves fewer than Q={self.Q} distinct keys for the designated set"
            )

    def angle(self, j: int) -> float:
        """Equatorial angle 2*pi*j/Q of position j (1-based)."""
        return position_angle(j, self.Q)


def position_angle(j: int, Q: int) -> float:
    """Equatorial angle of cipher position j in a length-Q message."""
    return canonical_angle(2 * math.pi * j / Q)


@dataclass(frozen=True)
class Key:
    """A key of the functionality: a lambda-bit string, or the aleph key.

    Attributes:
        bits: The key bits, or None for aleph.
    """

    bits: Optional[str] = None

    def __post_init__(self):
        if self.bits is not None:
            check_bitstring(self.bits, name='key')

    @classmethod
    def classical(cls, bits: str) -> 'Key':
        return cls(bits)

    @classmethod
    def aleph(cls) -> 'Key':
        return cls(None)

    @property
    def is_aleph(self) -> bool:
        return self.bits is None


@dataclass(frozen=True)
class FunctionKey:
    """Per-user secret: a prefix s_1..s_q of the secret bits, or bottom.

    Attributes:
        prefix: The revealed secret bits, or None for the all-bottom key.
        Q: Message length of the scheme instance the key was issued for.
    """

    prefix: Optional[str]
    Q: int

    def __post_init__(self):
        if self.prefix is not None:
            check_bitstring(self.prefix, name='prefix')
            if not 1 <= len(self.prefix) <= self.Q:
                raise ValueError(f"prefix length must lie in [1, {self.Q}], got {len(self.prefix)}")

    @classmethod
    def bottom(cls, Q: int) -> 'FunctionKey':
        return cls(None, Q)

    @property
    def is_bottom(self) -> bool:
        return self.prefix is None

    @property
    def q(self) -> int:
        """Number of revealed positions (0 for bottom)."""
        return 0 if self.prefix is None else len(self.prefix)


@dataclass(frozen=True)
class MasterSecret:
    """Efficient representation of the master secret.

    Attributes:
        params: Scheme parameters.
        s: sigma(kappa_Q), also the per-position secret bits s_1..s_Q.
        designated_keys: kappa_1..kappa_Q in rank order.
        eta: 1-based permutation of positions; identity by default.
    """

    params: SchemeParams
    s: str
    designated_keys: tuple[str, ...]
    eta: tuple[int, ...] = field(default=())

    def __post_init__(self):
        Q = self.params.Q
        check_bitstring(self.s, Q, 's')
        if not self.eta:
            object.__setattr__(self, 'eta', tuple(range(1, Q + 1)))
        object.__setattr__(self, 'eta', check_permutation(self.eta, Q))
        object.__setattr__(self, 'designated_keys', tuple(self.designated_keys))
        if len(self.designated_keys) != Q:
            raise ValueError(f"Expected {Q} designated keys, got {len(self.designated_keys)}")
        for key in self.designated_keys:
            check_bitstring(key, self.params.lam, 'designated key')
        if len(set(self.designated_keys)) != Q:
            raise ValueError("Designated keys must be pairwise distinct")
        if not images_in_range(self.s):
            raise ValueError("Secret s puts some sigma(kappa_q) outside [0, 2^Q - 1]")

    @cached_property
    def key_rank(self) -> dict[str, int]:
        """Map from designated key to its rank q."""
        return {key: q for q, key in enumerate(self.designated_keys, start=1)}

    def implied_image(self, q: int) -> int:
        """Integer value of sigma(kappa_q) = integer(s) - delta_q."""
        return int(self.s, 2) - delta_table(self.params.Q)[q]

    @cached_property
    def contexts(self) -> tuple[XiContext, ...]:
        return tuple(XiContext(int(bit), self.params.angle(j)) for j, bit in enumerate(self.s, start=1))

    def context(self, j: int) -> XiContext:
        """Cipher context (s_j, theta_j) of position j (1-based)."""
        return self.contexts[j - 1]


@dataclass(frozen=True)
class HfeCiphertext:
    """Q cipher blocks; block j is encrypted under angle 2*pi*j/Q."""

    blocks: tuple[XiCiphertext, ...]

    def __post_init__(self):
        object.__setattr__(self, 'blocks', tuple(self.blocks))
        if not self.blocks:
            raise ValueError("A ciphertext needs at least one block")

    @property
    def Q(self) -> int:
        return len(self.blocks)


def check_permutation(eta: Sequence[int], Q: int) -> tuple[int, ...]:
    """Validate a 1-based permutation of [Q].

    Raises:
        ValueError: If eta is not a bijection on {1, ..., Q}.
    """
    eta = tuple(int(x) for x in eta)
    if sorted(eta) != list(range(1, Q + 1)):
        raise ValueError(f"eta must be a permutation of 1..{Q}, got {list(eta)}")
    return eta


def delta_table(Q: int) -> dict[int, int]:
    """Offsets delta_q = sigma(kappa_Q) - sigma(kappa_q) for q in [Q].

    For each q exactly one of -(Q-q+1)/2 and (Q-q)/2 is an integer, because
    Q-q and Q-q+1 have opposite parity; that one is delta_q.

    Args:
        Q: Message length.

    Returns:
        Dict from rank q to its integer offset.
    """
    if Q < 1:
        raise ValueError(f"Q must be positive, got {Q}")
    table = {}
    for q in range(1, Q + 1):
        gap = Q - q
        table[q] = gap // 2 if gap % 2 == 0 else -(gap + 1) // 2
    return table


@lru_cache(maxsize=256)
def _offset_span(Q: int) -> tuple[int, int]:
    values = delta_table(Q).values()
    return min(values), max(values)


def images_in_range(s: str) -> bool:
    """Whether every implied image integer(s) - delta_q fits in len(s) bits."""
    low, high = _offset_span(len(s))
    value = int(s, 2)
    return value - high >= 0 and value - low <= 2 ** len(s) - 1


def _sample_distinct_keys(rng: np.random.Generator, lam: int, count: int) -> tuple[str, ...]:
    if lam <= _DIRECT_KEY_SAMPLING_BITS:
        picks = rng.choice(2 ** lam, size=count, replace=False)
        return tuple(format(int(x), f'0{lam}b') for x in picks)
    keys: list[str] = []
    seen = set()
    while len(keys) < count:
        candidate = _random_bits(rng, lam)
        if candidate not in seen:
            seen.add(candidate)
            keys.append(candidate)
    return tuple(keys)


def setup(
    params: SchemeParams,
    eta: Union[None, str, Sequence[int]] = None,
    rng: Optional[np.random.Generator] = None,
    resample_limit: int = RESAMPLE_LIMIT,
) -> MasterSecret:
    """Sample a master secret.

    Args:
        params: Scheme parameters.
        eta: Position permutation (1-based), None for the identity, or
             'random' to sample one.
        rng: Random generator; a fresh unseeded one if omitted.
        resample_limit: Attempts allowed to draw a boundary-consistent s.

    Returns:
        A MasterSecret satisfying all its invariants.

    Raises:
        ResampleExhaustedError: If no boundary-consistent s was drawn.
    """
    rng = rng if rng is not None else np.random.default_rng()
    Q = params.Q

    for attempt in range(1, resample_limit + 1):
        s = _random_bits(rng, Q)
        if images_in_range(s):
            break
        logger.debug(f"Resampling s (attempt {attempt}): an implied image left [0, 2^{Q} - 1]")
    else:
        raise ResampleExhaustedError(f"No boundary-consistent secret after {resample_limit} attempts")

    if isinstance(eta, str):
        if eta != 'random':
            raise ValueError(f"Unknown eta mode {eta!r}")
        eta = tuple(int(x) + 1 for x in rng.permutation(Q))

    keys = _sample_distinct_keys(rng, params.lam, Q)
    msk = MasterSecret(params=params, s=s, designated_keys=keys, eta=tuple(eta or ()))
    logger.debug(f"Setup complete: lambda={params.lam}, Q={Q}, identity eta={msk.eta == tuple(range(1, Q + 1))}")
    return msk


def keygen(msk: MasterSecret, k: Key) -> FunctionKey:
    """Derive the function key for key k.

    Args:
        msk: Master secret.
        k: Classical key of length lambda.

    Returns:
        The prefix s_1..s_q if k is kappa_q, otherwise the bottom key.

    Raises:
        AlephKeyError: If k is the aleph key.
    """
    if k.is_aleph:
        raise AlephKeyError("KeyGen is undefined for the aleph key")
    check_bitstring(k.bits, msk.params.lam, 'key')
    q = msk.key_rank.get(k.bits)
    if q is None:
        return FunctionKey.bottom(msk.params.Q)
    return FunctionKey(msk.s[:q], msk.params.Q)


def _permuted_bit(msk: MasterSecret, m: str, j: int) -> int:
    return int(m[msk.eta[j - 1] - 1])


def enc(msk: MasterSecret, m: str, rng: np.random.Generator) -> HfeCiphertext:
    """Encrypt a Q-bit message, block j carrying m_eta(j) under (s_j, 2*pi*j/Q)."""
    Q = msk.params.Q
    check_bitstring(m, Q, 'message')
    r_bits = rng.integers(0, 2, size=Q)
    return HfeCiphertext(tuple(
        qenc_with_r(msk.context(j), _permuted_bit(msk, m, j), int(r_bits[j - 1]))
        for j in range(1, Q + 1)
    ))


def enc_with_r(msk: MasterSecret, m: str, r_bits: str) -> HfeCiphertext:
    """Encrypt with every block's randomness pinned by r_bits."""
    Q = msk.params.Q
    check_bitstring(m, Q, 'message')
    check_bitstring(r_bits, Q, 'r_bits')
    return HfeCiphertext(tuple(
        qenc_with_r(msk.context(j), _permuted_bit(msk, m, j), int(r_bits[j - 1]))
        for j in range(1, Q + 1)
    ))


def dec(fk: FunctionKey, ct: HfeCiphertext) -> str:
    """Decrypt the positions a function key reveals.

    Args:
        fk: Function key from KeyGen.
        ct: Ciphertext.

    Returns:
        The recovered bits m_eta(1)..m_eta(q); the empty string for bottom.

    Raises:
        ValueError: If the key reveals more positions than the ciphertext holds.
        AmbiguousStateError: If the key's instance does not match the ciphertext.
    """
    if fk.is_bottom:
        return ''
    if fk.q > ct.Q:
        raise ValueError(f"Key reveals {fk.q} positions but the ciphertext has {ct.Q} blocks")
    return ''.join(
        str(qdec(XiContext(int(fk.prefix[j - 1]), position_angle(j, fk.Q)), ct.blocks[j - 1]))
        for j in range(1, fk.q + 1)
    )


def functionality(msk: MasterSecret, k: Key, m: str) -> Union[str, int]:
    """The functionality F_a(k, m).

    Returns:
        len(m) for the aleph key, m_eta(1)..m_eta(q) for kappa_q, and the empty
        string for every other key.
    """
    check_bitstring(m, msk.params.Q, 'message')
    if k.is_aleph:
        return len(m)
    check_bitstring(k.bits, msk.params.lam, 'key')
    q = msk.key_rank.get(k.bits, 0)
    return ''.join(m[msk.eta[j - 1] - 1] for j in range(1, q + 1))
