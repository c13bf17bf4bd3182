#!/usr/bin/env python3
"""Qubit functional-encryption simulator - command-line front end.

Verbs: setup | keygen | enc | dec | analyze | game.

Command results go to stdout (or --out) and never carry timestamps, so the
same flags and seed always produce byte-identical output. Logs go to stderr
and to a rotating file under the log directory.

Exit codes:
    0  success
    1  unexpected failure or I/O error
    2  parse or usage error (bad flags, malformed files, out-of-domain values)
    3  validity violation (invalid adversary, aleph key, exhausted budget)
    4  ambiguous measurement (key and ciphertext do not match)
    5  game verdict FAIL
"""

import argparse
import logging
import os
import sys
from logging.handlers import RotatingFileHandler
from typing import Optional

import numpy as np

from src.adversaries import adversary_names, get_adversary
from src.config import DEFAULT_SEED, LOG_DIR, THETA_GRID, validate_config
from src.database import RunLedger, make_run_id
from src.exceptions import (
    AlephKeyError,
    AmbiguousStateError,
    BudgetExhaustedError,
    InvalidAdversaryError,
    ParseError,
)
from src.games import (
    FUNCTION_PRIVACY,
    GAMES,
    MESSAGE_PRIVACY,
    WEAK_SIMULATION,
    run_function_privacy_game,
    run_message_privacy_game,
    run_weak_sim_game,
)
from src.hfe import Key, SchemeParams, dec, enc, keygen, setup
from src.reports import DEFAULT_CURVE_POINTS, REPORTS, build_report, format_table
from src.serialization import (
    hex_to_bits,
    parse_ciphertext,
    parse_function_key,
    parse_master_secret,
    serialize_ciphertext,
    serialize_function_key,
    serialize_master_secret,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INVALID = 3
EXIT_AMBIGUOUS = 4
EXIT_GAME_FAIL = 5

SIMULATOR_WARNING = (
    'Ciphertext files store qubit amplitudes raw. This is a simulator for '
    'studying the scheme, not a deployable cipher: anyone holding a ciphertext '
    'file can read the plaintext.'
)
EVIDENCE_NOTE = 'empirical evidence against a fixed strategy family, not a proof of security'


def setup_logging(verbose: bool = False, log_dir: str = LOG_DIR) -> None:
    """Configure logging with both file and console handlers.

    Args:
        verbose: If True, set logging level to DEBUG. Otherwise INFO.
        log_dir: Directory of the rotating log file qfe.log.
    """
    log_level = logging.DEBUG if verbose else logging.INFO
    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'

    root_logger = logging.getLogger()
    root_logger.setLevel(log_level)

    # Clear existing handlers to avoid duplicates when called multiple times
    root_logger.handlers.clear()

    # stdout is reserved for command output
    console_handler = logging.StreamHandler(sys.stderr)
    console_handler.setLevel(log_level)
    console_handler.setFormatter(logging.Formatter(log_format))
    root_logger.addHandler(console_handler)

    os.makedirs(log_dir, exist_ok=True)
    file_handler = RotatingFileHandler(
        os.path.join(log_dir, 'qfe.log'),
        maxBytes=10 * 1024 * 1024,  # 10MB
        backupCount=5
    )
    file_handler.setLevel(log_level)
    file_handler.setFormatter(logging.Formatter(log_format))
    root_logger.addHandler(file_handler)


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        out_dir = os.path.dirname(out)
        if out_dir:
            os.makedirs(out_dir, exist_ok=True)
        with open(out, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        logger.info(f"Wrote {out}")
    else:
        sys.stdout.write(text)
        sys.stdout.flush()


def _read(path: str) -> str:
    with open(path, 'r', encoding='utf-8') as f:
        return f.read()


def parse_eta(spec: Optional[str]):
    """Parse the --eta flag: None, 'identity', 'random' or a comma list like '2,1,4,3'.

    Raises:
        ParseError: If the list holds non-integers.
    """
    if spec is None or spec == 'identity':
        return None
    if spec == 'random':
        return 'random'
    try:
        return tuple(int(part) for part in spec.split(','))
    except ValueError as e:
        raise ParseError(f"--eta must be 'identity', 'random' or a comma-separated index list, got {spec!r}") from e


def parse_t_values(spec: Optional[str]) -> Optional[list[float]]:
    if spec is None:
        return None
    try:
        return [float(part) for part in spec.split(',')]
    except ValueError as e:
        raise ParseError(f"--t-values must be a comma-separated list of numbers, got {spec!r}") from e


def cmd_setup(args: argparse.Namespace) -> int:
    params = SchemeParams(lam=args.lam, Q=args.Q)
    msk = setup(params, eta=parse_eta(args.eta), rng=np.random.default_rng(args.seed))
    logger.info(f"Setup finished: lambda={params.lam}, Q={params.Q}, seed={args.seed}")
    _emit(serialize_master_secret(msk), args.out)
    return EXIT_OK


def cmd_keygen(args: argparse.Namespace) -> int:
    msk = parse_master_secret(_read(args.msk))
    if args.aleph:
        key = Key.aleph()
    elif args.q is not None:
        if not 1 <= args.q <= msk.params.Q:
            raise ValueError(f"--q must lie in [1, {msk.params.Q}], got {args.q}")
        key = Key.classical(msk.designated_keys[args.q - 1])
    else:
        key = Key.classical(hex_to_bits(args.key, msk.params.lam))
    fk = keygen(msk, key)
    logger.info(f"Issued a function key revealing {fk.q} position(s)")
    _emit(serialize_function_key(fk), args.out)
    return EXIT_OK


def cmd_enc(args: argparse.Namespace) -> int:
    msk = parse_master_secret(_read(args.msk))
    ct = enc(msk, args.message, np.random.default_rng(args.seed))
    logger.info(f"Encrypted a {ct.Q}-bit message into {ct.Q} blocks")
    _emit(serialize_ciphertext(ct), args.out)
    return EXIT_OK


def cmd_dec(args: argparse.Namespace) -> int:
    fk = parse_function_key(_read(args.key))
    ct = parse_ciphertext(_read(args.ct))
    prefix = dec(fk, ct)
    logger.info(f"Decrypted {len(prefix)} bit(s)")
    _emit(prefix + '\n', args.out)
    return EXIT_OK


def cmd_analyze(args: argparse.Namespace) -> int:
    rows = build_report(
        args.report,
        t_values=parse_t_values(args.t_values),
        points=args.points,
        theta_points=args.theta_grid,
    )
    _emit(format_table(rows), args.out)
    logger.info(f"Report {args.report}: {len(rows)} rows")
    return EXIT_OK


def _fmt(value: Optional[float]) -> str:
    return 'undefined' if value is None else f"{value:.6f}"


def cmd_game(args: argparse.Namespace) -> int:
    params = SchemeParams(lam=args.lam, Q=args.Q)
    adv = get_adversary(args.game, args.adversary)
    rng = np.random.default_rng(args.seed)

    lines = [
        f"game: {args.game}",
        f"adversary: {adv.name}",
        f"lambda: {params.lam}",
        f"Q: {params.Q}",
        f"seed: {args.seed}",
    ]
    run = {
        'game': args.game, 'adversary': adv.name, 'n_trials': args.n, 'seed': args.seed,
        'lam': params.lam, 'Q': params.Q, 'broken': args.broken,
    }

    if args.game == WEAK_SIMULATION:
        if args.broken:
            raise ValueError("--broken only applies to the privacy games")
        result = run_weak_sim_game(None, adv, params, args.n, rng)
        passed = result.passed
        lines += [
            f"trials: {result.n_trials}",
            f"distance: {result.distance:.6f}",
            f"bound: {result.bound:.6f}",
        ]
        run.update(distance=result.distance, bound=result.bound)
    else:
        runner = run_message_privacy_game if args.game == MESSAGE_PRIVACY else run_function_privacy_game
        estimate = runner(adv, params, args.n, rng, broken=args.broken)
        passed = estimate.passed
        lines += [
            f"broken: {str(args.broken).lower()}",
            f"trials: {estimate.n_trials}",
            f"p0_hat: {_fmt(estimate.p0_hat)}",
            f"p1_hat: {_fmt(estimate.p1_hat)}",
            f"gap: {_fmt(estimate.gap)}",
            f"bound: {estimate.bound:.6f}",
        ]
        run.update(p0_hat=estimate.p0_hat, p1_hat=estimate.p1_hat, bound=estimate.bound)

    verdict = 'PASS' if passed else 'FAIL'
    lines += [f"verdict: {verdict}", f"note: {EVIDENCE_NOTE}"]
    _emit('\n'.join(lines) + '\n', args.out)

    if args.ledger:
        ledger = RunLedger(args.ledger)
        run_id = make_run_id(args.game, adv.name, args.seed, args.n, params.lam, params.Q, args.broken)
        if ledger.is_run_recorded(run_id):
            logger.info(f"Replacing ledger entry {run_id}")
        ledger.record_run({**run, 'verdict': verdict})

    logger.info(f"Game {args.game} vs {adv.name}: {verdict}")
    return EXIT_OK if passed else EXIT_GAME_FAIL


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        '--seed',
        type=int,
        default=DEFAULT_SEED,
        help=f'Seed of the random generator (default: {DEFAULT_SEED})'
    )
    common.add_argument(
        '--out',
        default=None,
        help='Write the result to this path instead of stdout'
    )
    common.add_argument(
        '--verbose',
        action='store_true',
        help='Enable verbose (DEBUG) logging'
    )

    parser = argparse.ArgumentParser(
        prog='qfe',
        description='Qubit functional-encryption simulator - '
                    'set up, issue keys, encrypt, decrypt, analyze and play security games. '
                    + SIMULATOR_WARNING,
    )
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('setup', parents=[common], help='Sample a master secret')
    p.add_argument('--lambda', dest='lam', type=int, required=True, help='Key length lambda')
    p.add_argument('--Q', type=int, required=True, help='Message length Q (at least lambda)')
    p.add_argument('--eta', default=None,
                   help="Position permutation: 'identity' (default), 'random' or e.g. '2,1,4,3'")
    p.set_defaults(handler=cmd_setup)

    p = sub.add_parser('keygen', parents=[common], help='Issue a function key')
    p.add_argument('--msk', required=True, help='Master-secret file')
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument('--key', help='Key as hex (lambda bits)')
    group.add_argument('--q', type=int, help='Select the designated key of rank q')
    group.add_argument('--aleph', action='store_true', help='The aleph key (always rejected)')
    p.set_defaults(handler=cmd_keygen)

    p = sub.add_parser('enc', parents=[common], help='Encrypt a Q-bit message',
                       description=SIMULATOR_WARNING)
    p.add_argument('--msk', required=True, help='Master-secret file')
    p.add_argument('--message', required=True, help='Message as a 0/1 string of length Q')
    p.set_defaults(handler=cmd_enc)

    p = sub.add_parser('dec', parents=[common], help='Decrypt with a function key')
    p.add_argument('--key', required=True, help='Function-key file')
    p.add_argument('--ct', required=True, help='Ciphertext file')
    p.set_defaults(handler=cmd_dec)

    p = sub.add_parser('analyze', parents=[common], help='Print an analysis table')
    p.add_argument('report', choices=REPORTS)
    p.add_argument('--points', type=int, default=DEFAULT_CURVE_POINTS,
                   help=f'Points of the t grid for entropic-curve (default: {DEFAULT_CURVE_POINTS})')
    p.add_argument('--t-values', default=None, help='Explicit comma-separated t values for entropic-curve')
    p.add_argument('--theta-grid', type=int, default=THETA_GRID,
                   help=f'Points of the theta grid (default: {THETA_GRID})')
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser('game', parents=[common], help='Run a security game')
    p.add_argument('game', choices=GAMES)
    p.add_argument('--adversary', required=True,
                   help='Built-in strategy: ' + '; '.join(
                       f"{g}: {', '.join(adversary_names(g))}" for g in GAMES))
    p.add_argument('--n', type=int, default=10000, help='Number of trials (default: 10000)')
    p.add_argument('--lambda', dest='lam', type=int, default=8, help='Key length lambda (default: 8)')
    p.add_argument('--Q', type=int, default=8, help='Message length Q (default: 8)')
    p.add_argument('--broken', action='store_true',
                   help='Fix every r to 0 so the harness can be shown to detect insecurity')
    p.add_argument('--ledger', default=None, help='Record the verdict in this SQLite ledger')
    p.set_defaults(handler=cmd_game)

    return parser


def main(args: Optional[list[str]] = None) -> int:
    """CLI entry point.

    Args:
        args: Command-line arguments. If None, uses sys.argv.

    Returns:
        Exit code (see the module docstring).
    """
    parser = build_parser()
    try:
        parsed_args = parser.parse_args(args)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    setup_logging(verbose=parsed_args.verbose)

    try:
        validate_config()
        return parsed_args.handler(parsed_args)
    except AmbiguousStateError as e:
        logger.error(f"Key and ciphertext do not match: {e}")
        return EXIT_AMBIGUOUS
    except (InvalidAdversaryError, AlephKeyError, BudgetExhaustedError) as e:
        logger.error(f"Validity violation: {e}")
        return EXIT_INVALID
    except ValueError as e:
        logger.error(f"Invalid input: {e}", exc_info=parsed_args.verbose)
        return EXIT_USAGE
    except OSError as e:
        logger.error(f"I/O error: {e}")
        return EXIT_FAILURE
    except Exception as e:
        logger.error(f"Command failed: {e}", exc_info=True)
        return EXIT_FAILURE


if __name__ == '__main__':
    sys.exit(main())
