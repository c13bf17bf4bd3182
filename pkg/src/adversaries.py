"""Built-in adversary strategies for the security games.

Privacy-game strategies return a guess bit. Weak-simulation strategies return
a hashable output alpha that ends up in the game transcript.
"""

import logging

import numpy as np

from src.games import (
    FUNCTION_PRIVACY,
    MESSAGE_PRIVACY,
    WEAK_SIMULATION,
    AdversaryStrategy,
)
from src.hfe import SchemeParams
from src.qubit import dagger
from src.xi_cipher import h_map

logger = logging.getLogger(__name__)

PRIVACY_GAMES = frozenset({MESSAGE_PRIVACY, FUNCTION_PRIVACY})


def _bits(rng: np.random.Generator, n: int) -> str:
    return ''.join('1' if x else '0' for x in rng.integers(0, 2, size=n))


def constant_zero(oracle, params: SchemeParams, rng: np.random.Generator) -> int:
    return 0


def basis_measurer(oracle, params: SchemeParams, rng: np.random.Generator) -> int:
    """Encrypt (0^Q, 1^Q), measure c1 of a random block in the computational basis."""
    ct = oracle.encrypt('0' * params.Q, '1' * params.Q)
    block = int(rng.integers(1, params.Q + 1))
    return ct.measure(block, 1)


def rotation_measurer(oracle, params: SchemeParams, rng: np.random.Generator) -> int:
    """Encrypt (0^Q, 1^Q), undo H^theta_0 on c1 of block 1 and measure.

    The outcome is r xor b, which only reveals b when r is not uniform.
    """
    ct = oracle.encrypt('0' * params.Q, '1' * params.Q)
    return ct.measure(1, 1, rotation=dagger(h_map(params.angle(1), 0)))


def key_compare(oracle, params: SchemeParams, rng: np.random.Generator) -> int:
    """Take the rank-q user key, encrypt a pair agreeing on the first q bits, compare.

    The decrypted prefix is the same in both worlds; the guess falls back to a
    basis measurement of the last block, which the key does not reveal.
    """
    Q = params.Q
    q = Q - 1
    fk = oracle.user_key(q) if q >= 1 else None
    m0 = '0' * Q
    m1 = '0' * q + '1' * (Q - q)
    ct = oracle.encrypt(m0, m1)
    if fk is not None and ct.decrypt(fk) != m0[:q]:
        return 1
    return ct.measure(Q, 1)


def nondesignated_pair(oracle, params: SchemeParams, rng: np.random.Generator) -> int:
    """Query KeyGen_b on two distinct random keys and guess from whether the answer is bottom."""
    k0 = _bits(rng, params.lam)
    k1 = k0
    while k1 == k0:
        k1 = _bits(rng, params.lam)
    fk = oracle.keygen(k0, k1)
    return 0 if fk.is_bottom else 1


def echo(view, params: SchemeParams, rng: np.random.Generator) -> tuple:
    """Query a user key and a random key, decrypt everything, output the answers."""
    q = max(1, params.Q // 2)
    user = view.user_key(q)
    other = view.keygen(_bits(rng, params.lam))
    answers = tuple(
        (view.decrypt(i, user), view.decrypt(i, other))
        for i in range(view.count)
    )
    return (user.prefix, other.prefix, answers)


def silent(view, params: SchemeParams, rng: np.random.Generator) -> tuple:
    return (view.length,)


def weak_sim_basis_measurer(view, params: SchemeParams, rng: np.random.Generator) -> tuple:
    """Measure c1 of block 1 of every ciphertext in the computational basis."""
    return tuple(view.measure(i, 1, 1) for i in range(view.count))


REGISTRY: dict[str, dict[str, AdversaryStrategy]] = {
    MESSAGE_PRIVACY: {},
    FUNCTION_PRIVACY: {},
    WEAK_SIMULATION: {},
}


def register(strategy: AdversaryStrategy):
    for game in strategy.games:
        REGISTRY[game][strategy.name] = strategy


for _strategy in (
    AdversaryStrategy('constant-zero', constant_zero, PRIVACY_GAMES, 'always guesses 0'),
    AdversaryStrategy('basis-measurer', basis_measurer, PRIVACY_GAMES,
                      'computational-basis measurement of one ciphertext qubit'),
    AdversaryStrategy('rotation-measurer', rotation_measurer, PRIVACY_GAMES,
                      'fixed inverse rotation then measurement'),
    AdversaryStrategy('key-compare', key_compare, PRIVACY_GAMES,
                      'user key query, decrypt, compare'),
    AdversaryStrategy('nondesignated-pair', nondesignated_pair, frozenset({FUNCTION_PRIVACY}),
                      'challenge key pair of random keys'),
    AdversaryStrategy('echo', echo, frozenset({WEAK_SIMULATION}), 'outputs its oracle answers'),
    AdversaryStrategy('silent', silent, frozenset({WEAK_SIMULATION}), 'makes no queries'),
    AdversaryStrategy('basis-measurer', weak_sim_basis_measurer, frozenset({WEAK_SIMULATION}),
                      'measures every ciphertext in the computational basis'),
):
    register(_strategy)


def get_adversary(game: str, name: str) -> AdversaryStrategy:
    """Look up a built-in strategy.

    Raises:
        ValueError: If the game or the strategy name is unknown.
    """
    if game not in REGISTRY:
        raise ValueError(f"Unknown game {game!r}; choose from {sorted(REGISTRY)}")
    try:
        return REGISTRY[game][name]
    except KeyError:
        raise ValueError(
            f"Unknown adversary {name!r} for {game}; choose from {sorted(REGISTRY[game])}"
        ) from None


def adversary_names(game: str) -> list[str]:
    return sorted(REGISTRY.get(game, {}))
