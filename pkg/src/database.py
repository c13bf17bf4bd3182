"""Run ledger for security-game runs.

RunLedger keeps one SQLite row per distinct game configuration, so repeated
`game --ledger` invocations with identical arguments update the same record
instead of piling up duplicates.
"""

import logging
import os
import sqlite3
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Any, Optional

from src.config import LEDGER_PATH

logger = logging.getLogger(__name__)

VERDICTS = ('PASS', 'FAIL')


def make_run_id(game: str, adversary: str, seed: int, n_trials: int,
                lam: int, Q: int, broken: bool = False) -> str:
    """Identifier of a game configuration; identical arguments give identical ids."""
    return f"{game}:{adversary}:seed={seed}:n={n_trials}:lambda={lam}:Q={Q}:broken={int(broken)}"


class RunLedger:
    """Record game verdicts in SQLite.

    Attributes:
        db_path: Path to the SQLite database file, or ':memory:'.
    """

    def __init__(self, db_path: str = LEDGER_PATH):
        self.db_path = db_path
        self._is_memory = db_path == ':memory:'
        # an in-memory database lives only as long as its connection
        self._persistent_conn = None
        self._ensure_database_exists()

    def _ensure_database_exists(self):
        if not self._is_memory:
            db_dir = os.path.dirname(self.db_path)
            if db_dir:
                os.makedirs(db_dir, exist_ok=True)

        with self._get_connection() as conn:
            conn.execute('''
                CREATE TABLE IF NOT EXISTS game_runs (
                    run_id TEXT PRIMARY KEY,
                    game TEXT NOT NULL,
                    adversary TEXT NOT NULL,
                    n_trials INTEGER NOT NULL,
                    seed INTEGER NOT NULL,
                    lam INTEGER NOT NULL,
                    q_len INTEGER NOT NULL,
                    broken INTEGER NOT NULL DEFAULT 0,
                    p0_hat REAL,
                    p1_hat REAL,
                    distance REAL,
                    bound REAL NOT NULL,
                    verdict TEXT NOT NULL,
                    recorded_at TEXT NOT NULL
                )
            ''')
            conn.execute('''
                CREATE INDEX IF NOT EXISTS idx_recorded_at
                ON game_runs(recorded_at)
            ''')
            conn.execute('''
                CREATE INDEX IF NOT EXISTS idx_game
                ON game_runs(game)
            ''')
            conn.commit()
            logger.debug(f"Run ledger initialized at {self.db_path}")

    @contextmanager
    def _get_connection(self):
        """Yield a connection with the Row factory enabled.

        In-memory ledgers reuse one persistent connection.
        """
        if self._is_memory:
            if self._persistent_conn is None:
                self._persistent_conn = sqlite3.connect(':memory:')
                self._persistent_conn.row_factory = sqlite3.Row
            yield self._persistent_conn
        else:
            conn = sqlite3.connect(self.db_path)
            conn.row_factory = sqlite3.Row
            try:
                yield conn
            finally:
                conn.close()

    def is_run_recorded(self, run_id: str) -> bool:
        with self._get_connection() as conn:
            cursor = conn.execute('SELECT run_id FROM game_runs WHERE run_id = ?', (run_id,))
            return cursor.fetchone() is not None

    def record_run(self, run: dict) -> str:
        """Insert or replace a run record.

        Args:
            run: Dict with keys 'game', 'adversary', 'n_trials', 'seed', 'lam',
                 'Q', 'bound', 'verdict'. Optional: 'broken', 'p0_hat',
                 'p1_hat', 'distance'.

        Returns:
            The run id.

        Raises:
            ValueError: If the verdict is neither PASS nor FAIL.
        """
        if run['verdict'] not in VERDICTS:
            raise ValueError(f"Verdict must be one of {VERDICTS}, got {run['verdict']!r}")
        broken = bool(run.get('broken', False))
        run_id = make_run_id(run['game'], run['adversary'], run['seed'], run['n_trials'],
                             run['lam'], run['Q'], broken)
        recorded_at = datetime.now(timezone.utc).isoformat()

        with self._get_connection() as conn:
            conn.execute('''
                INSERT OR REPLACE INTO game_runs
                (run_id, game, adversary, n_trials, seed, lam, q_len, broken,
                 p0_hat, p1_hat, distance, bound, verdict, recorded_at)
                VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
            ''', (
                run_id,
                run['game'],
                run['adversary'],
                run['n_trials'],
                run['seed'],
                run['lam'],
                run['Q'],
                int(broken),
                run.get('p0_hat'),
                run.get('p1_hat'),
                run.get('distance'),
                run['bound'],
                run['verdict'],
                recorded_at,
            ))
            conn.commit()

        logger.info(f"Recorded run {run_id} as {run['verdict']}")
        return run_id

    def get_run(self, run_id: str) -> Optional[dict[str, Any]]:
        with self._get_connection() as conn:
            cursor = conn.execute('SELECT * FROM game_runs WHERE run_id = ?', (run_id,))
            row = cursor.fetchone()
            return dict(row) if row is not None else None

    def get_run_stats(self) -> dict:
        """Summarize the ledger.

        Returns:
            Dictionary containing:
                - total_runs: Number of recorded runs
                - verdict_breakdown: Dict mapping verdict to count
                - game_breakdown: Dict mapping game to count
                - recorded_today: Runs recorded today (UTC)
        """
        with self._get_connection() as conn:
            total = conn.execute('SELECT COUNT(*) AS count FROM game_runs').fetchone()['count']

            cursor = conn.execute('SELECT verdict, COUNT(*) AS count FROM game_runs GROUP BY verdict')
            verdicts = {row['verdict']: row['count'] for row in cursor.fetchall()}

            cursor = conn.execute('SELECT game, COUNT(*) AS count FROM game_runs GROUP BY game')
            games = {row['game']: row['count'] for row in cursor.fetchall()}

            today = conn.execute('''
                SELECT COUNT(*) AS count
                FROM game_runs
                WHERE date(recorded_at) = date('now')
            ''').fetchone()['count']

            return {
                'total_runs': total,
                'verdict_breakdown': verdicts,
                'game_breakdown': games,
                'recorded_today': today,
            }

    def get_failed_runs(self, limit: int = 10) -> list[dict[str, Any]]:
        """Most recent FAIL verdicts, newest first."""
        with self._get_connection() as conn:
            cursor = conn.execute('''
                SELECT run_id, game, adversary, n_trials, broken, p0_hat, p1_hat,
                       distance, bound, recorded_at
                FROM game_runs
                WHERE verdict = 'FAIL'
                ORDER BY recorded_at DESC
                LIMIT ?
            ''', (limit,))
            return [dict(row) for row in cursor.fetchall()]

    def cleanup_old_records(self, days: int = 90) -> int:
        """Delete records older than the given number of days.

        Returns:
            Number of deleted records.
        """
        with self._get_connection() as conn:
            cursor = conn.execute('''
                DELETE FROM game_runs
                WHERE date(recorded_at) < date('now', '-' || ? || ' days')
            ''', (days,))
            conn.commit()
            deleted = cursor.rowcount
            logger.info(f"Cleaned up {deleted} run records older than {days} days")
            return deleted

    def clear(self) -> int:
        """Delete every record; returns the number removed."""
        with self._get_connection() as conn:
            cursor = conn.execute('DELETE FROM game_runs')
            conn.commit()
            logger.info(f"Cleared {cursor.rowcount} run records")
            return cursor.rowcount
