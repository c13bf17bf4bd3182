"""Security-game harnesses for the hybrid functional-encryption scheme.

Three games are implemented:

- full message privacy: the adversary gets a KeyGen oracle and a challenge
  encryption oracle Enc_b(m0, m1), and must guess b;
- full function privacy: the key oracle is challenge-indexed too,
  KeyGen_b(k0, k1);
- weak simulation: the adversary's transcript in the real world is compared
  against the transcript produced by a built-in simulator that only sees
  functionality outputs.

Adversaries never see raw amplitudes. Ciphertexts are exposed through
CiphertextHandle, which supports single-qubit measurement (optionally after a
rotation) and honest decryption with a function key. Every oracle call counts
against the query budget.

Advantages measured here are empirical evidence against a fixed family of
strategies, not a proof of security.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Optional, Union

import numpy as np

from src.config import MEASURE_TOL, QUERY_BUDGET
from src.exceptions import BudgetExhaustedError, InvalidAdversaryError
from src.hfe import (
    FunctionKey,
    HfeCiphertext,
    Key,
    MasterSecret,
    SchemeParams,
    check_bitstring,
    enc,
    enc_with_r,
    functionality,
    keygen,
    position_angle,
    setup,
)
from src.qubit import PureState, Unitary2, apply, check_bit, dagger, sample_measure
from src.serialization import msk_fingerprint
from src.xi_cipher import h_map

logger = logging.getLogger(__name__)

MESSAGE_PRIVACY = 'msg-privacy'
FUNCTION_PRIVACY = 'func-privacy'
WEAK_SIMULATION = 'weak-sim'
GAMES = (MESSAGE_PRIVACY, FUNCTION_PRIVACY, WEAK_SIMULATION)

# Roughly four standard deviations of a binomial frequency.
BOUND_FACTOR = 4.0
WEAK_SIM_MESSAGES = 2


@dataclass(frozen=True)
class KeyQuery:
    """A key query; the message-privacy game records it as (k, k)."""

    k0: str
    k1: str


@dataclass(frozen=True)
class MessageQuery:
    """A challenge message pair."""

    m0: str
    m1: str


Query = Union[KeyQuery, MessageQuery]


@dataclass
class GameTranscript:
    """Record of one game trial.

    Attributes:
        a_descriptor: Fingerprint of the master secret (never the secret).
        queries: Key and message queries in the order they were made.
        alpha: Adversary (or simulator) output.
        tau: Auxiliary state token from the message generator.
    """

    a_descriptor: str
    queries: list[Query] = field(default_factory=list)
    alpha: Any = None
    tau: Any = None

    @property
    def key_queries(self) -> list[KeyQuery]:
        return [q for q in self.queries if isinstance(q, KeyQuery)]

    @property
    def message_queries(self) -> list[MessageQuery]:
        return [q for q in self.queries if isinstance(q, MessageQuery)]


@dataclass(frozen=True)
class AdvantageEstimate:
    """Empirical guess-1 frequencies conditioned on the challenge bit.

    A frequency is None when no trial drew that challenge bit; the gap is then
    undefined and the bound infinite.
    """

    p0_hat: Optional[float]
    p1_hat: Optional[float]
    n_trials: int
    bound: float

    def __post_init__(self):
        if self.n_trials < 1:
            raise ValueError(f"n_trials must be positive, got {self.n_trials}")
        for name, value in (('p0_hat', self.p0_hat), ('p1_hat', self.p1_hat)):
            if value is not None and not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value!r}")

    @property
    def gap(self) -> Optional[float]:
        if self.p0_hat is None or self.p1_hat is None:
            return None
        return abs(self.p0_hat - self.p1_hat)

    @property
    def passed(self) -> bool:
        return self.gap is None or self.gap <= self.bound


@dataclass(frozen=True)
class WeakSimResult:
    """Empirical real and ideal transcript distributions of a weak-sim run."""

    real: Counter
    ideal: Counter
    n_trials: int

    @property
    def distance(self) -> float:
        """Statistical distance between the two empirical distributions."""
        support = set(self.real) | set(self.ideal)
        return 0.5 * sum(abs(self.real[x] - self.ideal[x]) for x in support) / self.n_trials

    @property
    def bound(self) -> float:
        return BOUND_FACTOR / math.sqrt(self.n_trials)

    @property
    def passed(self) -> bool:
        return self.distance <= self.bound


@dataclass(frozen=True)
class AdversaryStrategy:
    """A named adversary.

    Attributes:
        name: Registry name.
        behavior: Called as behavior(oracle, params, rng). Privacy-game
                  strategies return a guess bit; weak-sim strategies return a
                  hashable output alpha.
        games: Games the strategy is written for.
        description: One-line summary for reports.
    """

    name: str
    behavior: Callable[[Any, SchemeParams, np.random.Generator], Any]
    games: frozenset[str]
    description: str = ''


def estimate_advantage(guesses0: list[int], guesses1: list[int]) -> AdvantageEstimate:
    """Estimate |Pr[guess=1 | b=0] - Pr[guess=1 | b=1]| from guess samples.

    One list may be empty; its frequency is then None and the bound infinite.

    Raises:
        ValueError: If both lists are empty.
    """
    if not guesses0 and not guesses1:
        raise ValueError("At least one guess list must be non-empty")
    n0, n1 = len(guesses0), len(guesses1)
    smaller = min(n0, n1)
    return AdvantageEstimate(
        p0_hat=sum(guesses0) / n0 if n0 else None,
        p1_hat=sum(guesses1) / n1 if n1 else None,
        n_trials=n0 + n1,
        bound=BOUND_FACTOR / math.sqrt(smaller) if smaller else math.inf,
    )


def _key_message_pairs(transcript: GameTranscript):
    for kq in transcript.key_queries:
        for mq in transcript.message_queries:
            yield kq, mq


def validate_message_privacy_queries(transcript: GameTranscript, msk: MasterSecret) -> bool:
    """Every queried key must give equal functionality on both messages of every pair."""
    for kq, mq in _key_message_pairs(transcript):
        key = Key.classical(kq.k0)
        if functionality(msk, key, mq.m0) != functionality(msk, key, mq.m1):
            return False
    return True


def validate_function_privacy_queries(transcript: GameTranscript, msk: MasterSecret) -> bool:
    """Every key pair and message pair must satisfy f0(m0) = f1(m1) with |m0| = |m1|."""
    for mq in transcript.message_queries:
        if len(mq.m0) != len(mq.m1):
            return False
    for kq, mq in _key_message_pairs(transcript):
        if functionality(msk, Key.classical(kq.k0), mq.m0) != functionality(msk, Key.classical(kq.k1), mq.m1):
            return False
    return True


class _QueryMeter:
    """Counts oracle calls against a budget."""

    def __init__(self, budget: int):
        self.budget = budget
        self.used = 0

    def charge(self, what: str):
        self.used += 1
        if self.used > self.budget:
            raise BudgetExhaustedError(f"Query budget of {self.budget} exhausted at {what}")


class CiphertextHandle:
    """Measurement-only access to the qubits of one ciphertext.

    Blocks and components are 1-based blocks j in [Q] and components 0 (c0)
    or 1 (c1). Measurements collapse the measured qubit.
    """

    def __init__(self, ct: HfeCiphertext, rng: np.random.Generator, meter: _QueryMeter,
                 tol: float = MEASURE_TOL):
        self._qubits = [[block.c0, block.c1] for block in ct.blocks]
        self._rng = rng
        self._meter = meter
        self._tol = tol

    @property
    def Q(self) -> int:
        return len(self._qubits)

    def _observe(self, block: int, component: int, rotation: Optional[Unitary2]) -> int:
        if not 1 <= block <= self.Q:
            raise ValueError(f"block must lie in [1, {self.Q}], got {block}")
        check_bit(component, 'component')
        psi = self._qubits[block - 1][component]
        if rotation is not None:
            psi = apply(rotation, psi)
        p0, p1 = psi.probabilities()
        # certain outcomes draw no randomness
        if p1 <= self._tol:
            outcome = 0
        elif p0 <= self._tol:
            outcome = 1
        else:
            outcome = sample_measure(psi, self._rng)
        collapsed = PureState.basis(outcome)
        if rotation is not None:
            collapsed = apply(dagger(rotation), collapsed)
        self._qubits[block - 1][component] = collapsed
        return outcome

    def measure(self, block: int, component: int, rotation: Optional[Unitary2] = None) -> int:
        """Measure one qubit in the computational basis, after an optional rotation."""
        self._meter.charge('measure')
        return self._observe(block, component, rotation)

    def decrypt(self, fk: FunctionKey) -> str:
        """Run Dec with a function key on the current qubit states."""
        self._meter.charge('decrypt')
        if fk.is_bottom:
            return ''
        if fk.q > self.Q:
            raise ValueError(f"Key reveals {fk.q} positions but the ciphertext has {self.Q} blocks")
        bits = []
        for j in range(1, fk.q + 1):
            theta = position_angle(j, fk.Q)
            r = self._observe(j, 0, dagger(h_map(theta, int(fk.prefix[j - 1]))))
            bits.append(str(self._observe(j, 1, dagger(h_map(theta, r)))))
        return ''.join(bits)


class MessagePrivacyOracle:
    """KeyGen_msk(.) and Enc_msk,b(., .) for one trial of the message-privacy game."""

    validator = staticmethod(validate_message_privacy_queries)

    def __init__(self, msk: MasterSecret, b: int, rng: np.random.Generator,
                 transcript: GameTranscript, budget: int = QUERY_BUDGET, broken: bool = False):
        self._msk = msk
        self._b = check_bit(b, 'b')
        self._rng = rng
        self._meter = _QueryMeter(budget)
        self._broken = broken
        self.transcript = transcript

    @property
    def queries_used(self) -> int:
        return self._meter.used

    def _record(self, query: Query):
        self.transcript.queries.append(query)
        if not self.validator(self.transcript, self._msk):
            raise InvalidAdversaryError(f"Query {query} makes the adversary invalid", query=query)

    def _issue(self, bits: Union[str, Key]) -> tuple[str, FunctionKey]:
        key = bits if isinstance(bits, Key) else Key.classical(bits)
        fk = keygen(self._msk, key)
        return key.bits, fk

    def user_key(self, q: int) -> FunctionKey:
        """The function key distributed to the rank-q user after Setup."""
        self._meter.charge('user_key')
        if not 1 <= q <= self._msk.params.Q:
            raise ValueError(f"q must lie in [1, {self._msk.params.Q}], got {q}")
        kappa = self._msk.designated_keys[q - 1]
        self._record(KeyQuery(kappa, kappa))
        return keygen(self._msk, Key.classical(kappa))

    def keygen(self, k: Union[str, Key]) -> FunctionKey:
        self._meter.charge('keygen')
        bits, fk = self._issue(k)
        self._record(KeyQuery(bits, bits))
        return fk

    def encrypt(self, m0: str, m1: str) -> CiphertextHandle:
        """Encrypt m_b and hand back measurement access to the ciphertext."""
        self._meter.charge('encrypt')
        Q = self._msk.params.Q
        check_bitstring(m0, Q, 'm0')
        check_bitstring(m1, Q, 'm1')
        self._record(MessageQuery(m0, m1))
        message = m1 if self._b else m0
        if self._broken:
            ct = enc_with_r(self._msk, message, '0' * Q)
        else:
            ct = enc(self._msk, message, self._rng)
        return CiphertextHandle(ct, self._rng, self._meter)


class FunctionPrivacyOracle(MessagePrivacyOracle):
    """Challenge-indexed oracles KeyGen_msk,b(., .) and Enc_msk,b(., .)."""

    validator = staticmethod(validate_function_privacy_queries)

    def keygen(self, k0: Union[str, Key], k1: Optional[Union[str, Key]] = None) -> FunctionKey:
        """Return KeyGen(k_b); a single key is queried as the pair (k0, k0)."""
        self._meter.charge('keygen')
        bits0, fk0 = self._issue(k0)
        bits1, fk1 = self._issue(k1 if k1 is not None else k0)
        self._record(KeyQuery(bits0, bits1))
        return fk1 if self._b else fk0


def _run_privacy_game(
    game: str,
    oracle_cls: type,
    adv: AdversaryStrategy,
    params: SchemeParams,
    n_trials: int,
    rng: np.random.Generator,
    broken: bool,
    budget: int,
) -> AdvantageEstimate:
    if game not in adv.games:
        raise ValueError(f"Adversary {adv.name!r} does not play {game}")
    if n_trials < 1:
        raise ValueError(f"n_trials must be positive, got {n_trials}")

    # balanced challenge bits in a seeded order
    challenge_bits = rng.permutation(np.arange(n_trials) % 2)
    guesses: dict[int, list[int]] = {0: [], 1: []}
    for trial, b in enumerate(challenge_bits.tolist()):
        msk = setup(params, rng=rng)
        transcript = GameTranscript(a_descriptor=msk_fingerprint(msk))
        oracle = oracle_cls(msk, b, rng, transcript, budget=budget, broken=broken)
        guess = check_bit(int(adv.behavior(oracle, params, rng)), 'guess')
        if not oracle.validator(transcript, msk):
            raise InvalidAdversaryError(f"Adversary {adv.name!r} is invalid in trial {trial}")
        transcript.alpha = guess
        guesses[b].append(guess)
        logger.debug(f"{game} trial {trial}: b={b}, guess={guess}, queries={oracle.queries_used}")

    estimate = estimate_advantage(guesses[0], guesses[1])
    gap = 'undefined' if estimate.gap is None else f"{estimate.gap:.4f}"
    logger.info(
        f"{game} vs {adv.name}: gap={gap}, bound={estimate.bound:.4f}, "
        f"n={estimate.n_trials}, broken={broken}"
    )
    return estimate


def run_message_privacy_game(
    adv: AdversaryStrategy,
    params: SchemeParams,
    n_trials: int,
    rng: np.random.Generator,
    broken: bool = False,
    budget: int = QUERY_BUDGET,
) -> AdvantageEstimate:
    """Run the full message-privacy game with a fresh master secret per trial.

    Args:
        adv: Adversary strategy.
        params: Scheme parameters.
        n_trials: Number of independent trials.
        rng: Random generator driving setup, challenge bits and measurements.
        broken: Encrypt with every r fixed to 0 (harness soundness check).
        budget: Oracle calls allowed per trial.

    Returns:
        The empirical advantage estimate.

    Raises:
        InvalidAdversaryError: If a query violates f(m0) = f(m1).
        BudgetExhaustedError: If a trial exceeds the budget.
    """
    return _run_privacy_game(MESSAGE_PRIVACY, MessagePrivacyOracle, adv, params, n_trials, rng, broken, budget)


def run_function_privacy_game(
    adv: AdversaryStrategy,
    params: SchemeParams,
    n_trials: int,
    rng: np.random.Generator,
    broken: bool = False,
    budget: int = QUERY_BUDGET,
) -> AdvantageEstimate:
    """Run the full function-privacy game; arguments as run_message_privacy_game."""
    return _run_privacy_game(FUNCTION_PRIVACY, FunctionPrivacyOracle, adv, params, n_trials, rng, broken, budget)


MessageGenerator = Callable[[SchemeParams, np.random.Generator], tuple[tuple[str, ...], Hashable]]


def random_message_vector(params: SchemeParams, rng: np.random.Generator) -> tuple[tuple[str, ...], Hashable]:
    """Default Msg(1^lambda): two uniform Q-bit messages, tau is their total parity."""
    messages = tuple(
        ''.join('1' if x else '0' for x in rng.integers(0, 2, size=params.Q))
        for _ in range(WEAK_SIM_MESSAGES)
    )
    tau = sum(m.count('1') for m in messages) % 2
    return messages, tau


class _WeakSimOracle:
    """Oracles shared by the real view and the simulated view."""

    def __init__(self, msk: MasterSecret, handles: list[CiphertextHandle], meter: _QueryMeter):
        self._msk = msk
        self._handles = handles
        self._meter = meter
        self.key_queries: list[str] = []

    @property
    def count(self) -> int:
        """Number of encrypted messages z."""
        return len(self._handles)

    @property
    def length(self) -> int:
        """Total plaintext length zQ, the only thing the aleph key reveals."""
        return self.count * self._msk.params.Q

    def user_key(self, q: int) -> FunctionKey:
        self._meter.charge('user_key')
        if not 1 <= q <= self._msk.params.Q:
            raise ValueError(f"q must lie in [1, {self._msk.params.Q}], got {q}")
        kappa = self._msk.designated_keys[q - 1]
        self.key_queries.append(kappa)
        return keygen(self._msk, Key.classical(kappa))

    def keygen(self, k: Union[str, Key]) -> FunctionKey:
        self._meter.charge('keygen')
        key = k if isinstance(k, Key) else Key.classical(k)
        fk = keygen(self._msk, key)
        self.key_queries.append(key.bits)
        return fk

    def measure(self, index: int, block: int, component: int, rotation: Optional[Unitary2] = None) -> int:
        return self._handle(index).measure(block, component, rotation)

    def _handle(self, index: int) -> CiphertextHandle:
        if not 0 <= index < self.count:
            raise ValueError(f"message index must lie in [0, {self.count}), got {index}")
        return self._handles[index]


class WeakSimView(_WeakSimOracle):
    """Real world: ciphertexts of the actual messages."""

    def decrypt(self, index: int, fk: FunctionKey) -> str:
        return self._handle(index).decrypt(fk)


class SimulatedView(_WeakSimOracle):
    """Ideal world: the simulator's view, built from functionality outputs only.

    The simulator holds the functionality index a. It answers key queries with
    S_a(y), the first q bits of sigma(kappa_Q), shows encryptions of the
    all-zero vector, and answers decryptions by querying F_a(y, m).
    """

    def __init__(self, msk: MasterSecret, handles: list[CiphertextHandle], meter: _QueryMeter,
                 query_functionality: Callable[[Key, int], Any]):
        super().__init__(msk, handles, meter)
        self._query_functionality = query_functionality
        self._issued: dict[FunctionKey, str] = {}

    def user_key(self, q: int) -> FunctionKey:
        fk = super().user_key(q)
        self._issued[fk] = self.key_queries[-1]
        return fk

    def keygen(self, k: Union[str, Key]) -> FunctionKey:
        fk = super().keygen(k)
        self._issued[fk] = self.key_queries[-1]
        return fk

    def decrypt(self, index: int, fk: FunctionKey) -> str:
        self._meter.charge('decrypt')
        self._handle(index)
        if fk not in self._issued:
            raise InvalidAdversaryError("The simulator only answers decryptions under keys it issued")
        return self._query_functionality(Key.classical(self._issued[fk]), index)


def _trial_streams(seed: int) -> tuple[np.random.Generator, ...]:
    """Independent (setup, message, encryption, measurement, adversary) generators."""
    return tuple(np.random.default_rng(child) for child in np.random.SeedSequence(seed).spawn(5))


def _weak_sim_world(
    ideal: bool,
    adv: AdversaryStrategy,
    params: SchemeParams,
    msg_gen: MessageGenerator,
    seed: int,
    budget: int,
) -> tuple[GameTranscript, tuple[str, ...]]:
    setup_rng, msg_rng, enc_rng, measure_rng, adv_rng = _trial_streams(seed)
    msk = setup(params, rng=setup_rng)
    messages, tau = msg_gen(params, msg_rng)
    for m in messages:
        check_bitstring(m, params.Q, 'generated message')
    meter = _QueryMeter(budget)

    if ideal:
        shown = tuple('0' * params.Q for _ in messages)
    else:
        shown = messages
    handles = [CiphertextHandle(enc(msk, m, enc_rng), measure_rng, meter) for m in shown]

    if ideal:
        def query_functionality(key: Key, index: int) -> Any:
            return functionality(msk, key, messages[index])

        view = SimulatedView(msk, handles, meter, query_functionality)
    else:
        view = WeakSimView(msk, handles, meter)

    alpha = adv.behavior(view, params, adv_rng)
    return GameTranscript(
        a_descriptor=msk_fingerprint(msk),
        queries=[KeyQuery(y, y) for y in view.key_queries],
        alpha=alpha,
        tau=tau,
    ), messages


def _transcript_tuple(transcript: GameTranscript, messages: tuple[str, ...]) -> tuple:
    """(a, m, tau, alpha, y_1..y_l) with a replaced by its fingerprint."""
    return (
        transcript.a_descriptor,
        messages,
        transcript.tau,
        transcript.alpha,
        tuple(q.k0 for q in transcript.key_queries),
    )


def run_weak_sim_game(
    msg_gen: Optional[MessageGenerator],
    adv: AdversaryStrategy,
    params: SchemeParams,
    n_trials: int,
    rng: np.random.Generator,
    budget: int = QUERY_BUDGET,
) -> WeakSimResult:
    """Run the weak-simulation game with matched real/ideal seed streams.

    Each trial draws one seed; the real and ideal worlds rebuild identical
    setup, message, encryption, measurement and adversary generators from it.

    Args:
        msg_gen: Message generator returning (messages, tau); None for
                 random_message_vector.
        adv: Weak-sim adversary strategy.
        params: Scheme parameters.
        n_trials: Number of trials per world.
        rng: Generator the per-trial seeds are drawn from.
        budget: Oracle calls allowed per trial and world.

    Returns:
        Empirical real and ideal transcript distributions.
    """
    if WEAK_SIMULATION not in adv.games:
        raise ValueError(f"Adversary {adv.name!r} does not play {WEAK_SIMULATION}")
    if n_trials < 1:
        raise ValueError(f"n_trials must be positive, got {n_trials}")
    msg_gen = msg_gen or random_message_vector

    real: Counter = Counter()
    ideal: Counter = Counter()
    for seed in rng.integers(0, 2 ** 63, size=n_trials):
        transcript, messages = _weak_sim_world(False, adv, params, msg_gen, int(seed), budget)
        real[_transcript_tuple(transcript, messages)] += 1
        transcript, messages = _weak_sim_world(True, adv, params, msg_gen, int(seed), budget)
        ideal[_transcript_tuple(transcript, messages)] += 1

    result = WeakSimResult(real=real, ideal=ideal, n_trials=n_trials)
    logger.info(f"{WEAK_SIMULATION} vs {adv.name}: distance={result.distance:.4f}, n={n_trials}")
    return result
