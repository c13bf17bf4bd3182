#!/usr/bin/env python3
"""Clear all recorded game runs from the run ledger.

Usage:
    python scripts/clear_run_ledger.py                    # Interactive mode
    python scripts/clear_run_ledger.py --force            # No confirmation
    python scripts/clear_run_ledger.py --older-than 30    # Only runs older than 30 days
    python scripts/clear_run_ledger.py --show RUN_ID      # Print one run, delete nothing
"""

import argparse
import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent))

from src.config import LEDGER_PATH  # noqa: E402
from src.database import RunLedger  # noqa: E402


def show_run(ledger: RunLedger, run_id: str) -> int:
    if not ledger.is_run_recorded(run_id):
        print(f"Error: No run {run_id!r} in the ledger", file=sys.stderr)
        return 1
    print(json.dumps(ledger.get_run(run_id), indent=2))
    return 0


def list_failed_runs(ledger: RunLedger, limit: int = 10) -> None:
    failed = ledger.get_failed_runs(limit)
    if not failed:
        return
    print(f"Most recent FAIL verdicts (up to {limit}):")
    for row in failed:
        print(f"  {row['run_id']}  recorded {row['recorded_at']}")


def main(args=None) -> int:
    parser = argparse.ArgumentParser(description="Clear recorded game runs from the run ledger")
    parser.add_argument("--db", default=LEDGER_PATH, help=f"Ledger path (default: {LEDGER_PATH})")
    parser.add_argument("--force", action="store_true", help="Skip confirmation prompt")
    parser.add_argument("--older-than", type=int, default=None, metavar="DAYS",
                        help="Only delete runs recorded more than DAYS days ago")
    parser.add_argument("--show", default=None, metavar="RUN_ID",
                        help="Print one recorded run as JSON and exit")
    parsed = parser.parse_args(args)

    if not Path(parsed.db).exists():
        print(f"Error: Ledger not found at {parsed.db}", file=sys.stderr)
        return 1

    ledger = RunLedger(parsed.db)
    if parsed.show is not None:
        return show_run(ledger, parsed.show)

    current_count = ledger.get_run_stats()['total_runs']
    print(f"Current runs in ledger: {current_count}")

    if current_count == 0:
        print("Ledger is already empty. Nothing to delete.")
        return 0

    list_failed_runs(ledger)

    if not parsed.force:
        scope = f"runs older than {parsed.older_than} days" if parsed.older_than is not None else f"all {current_count} runs"
        response = input(f"Delete {scope}? (y/N) ")
        if response.lower() not in ['y', 'yes']:
            print("Cancelled.")
            return 0

    if parsed.older_than is not None:
        deleted = ledger.cleanup_old_records(parsed.older_than)
    else:
        deleted = ledger.clear()

    remaining = ledger.get_run_stats()['total_runs']
    print(f"Done! Deleted {deleted}, remaining: {remaining}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
