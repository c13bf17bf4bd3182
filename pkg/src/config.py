"""Configuration management for the qubit functional-encryption simulator.

Loads environment variables from .env file and validates the numeric settings
that the simulator, the game harness and the CLI fall back on.
"""

import os
from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

# Randomness
DEFAULT_SEED = int(os.getenv('QFE_DEFAULT_SEED', 0))

# Deterministic measurement tolerance (probability-1 outcomes)
MEASURE_TOL = float(os.getenv('QFE_MEASURE_TOL', 1e-9))

# Security games
QUERY_BUDGET = int(os.getenv('QFE_QUERY_BUDGET', 2 ** 10))

# Setup
RESAMPLE_LIMIT = int(os.getenv('QFE_RESAMPLE_LIMIT', 1000))

# Analysis
THETA_GRID = int(os.getenv('QFE_THETA_GRID', 64))

# Output locations
LOG_DIR = os.getenv('QFE_LOG_DIR', 'logs')
LEDGER_PATH = os.getenv('QFE_LEDGER_PATH', 'data/game_runs.db')


def validate_config():
    """Validate the numeric settings loaded from the environment.

    Raises:
        ValueError: If any setting is outside its allowed range.
    """
    problems = []
    if DEFAULT_SEED < 0:
        problems.append('QFE_DEFAULT_SEED must be non-negative')
    if not 0 < MEASURE_TOL < 0.5:
        problems.append('QFE_MEASURE_TOL must lie in (0, 0.5)')
    if QUERY_BUDGET < 1:
        problems.append('QFE_QUERY_BUDGET must be positive')
    if RESAMPLE_LIMIT < 1:
        problems.append('QFE_RESAMPLE_LIMIT must be positive')
    if THETA_GRID < 1:
        problems.append('QFE_THETA_GRID must be positive')

    if problems:
        raise ValueError(f"Invalid configuration: {'; '.join(problems)}")
