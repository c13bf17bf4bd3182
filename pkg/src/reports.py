"""Analysis reports rendered as plain-text tables.

Each report function returns a list of row dicts; format_table() turns rows
into aligned columns. Output contains no timestamps so that identical
arguments always produce identical text.
"""

import logging
import math
from typing import Optional, Sequence

from src.config import THETA_GRID
from src.exceptions import DomainError
from src.indist import (
    MessageDistribution,
    avg_joint_cipher_state,
    avg_message_cipher_state,
    classical_channel_gap,
    entangled_channel_gap,
    entropic_bound,
    xi_superoperator,
)
from src.qubit import DensityMatrix, trace_distance

logger = logging.getLogger(__name__)

REPORTS = ('entropic-curve', 'avg-states', 'ind-channel')
DEFAULT_CURVE_POINTS = 11


def theta_grid(size: int = THETA_GRID) -> list[float]:
    """Evenly spaced angles 2*pi*i/size for i in [0, size)."""
    if size < 1:
        raise DomainError(f"theta grid needs at least one point, got {size}")
    return [2 * math.pi * i / size for i in range(size)]


def t_grid(points: int = DEFAULT_CURVE_POINTS) -> list[float]:
    """Evenly spaced min-entropy values from 0 to 1 inclusive."""
    if points < 2:
        raise DomainError(f"t grid needs at least two points, got {points}")
    return [i / (points - 1) for i in range(points)]


def entropic_curve_rows(
    t_values: Optional[Sequence[float]] = None,
    theta_points: int = THETA_GRID,
) -> list[dict]:
    """Compare the computed distance to I/2 with the entropic bound.

    For each t the message distribution is (2^-t, 1 - 2^-t); the computed
    column is the largest distance over the theta grid and both r.

    Raises:
        DomainError: If some t lies outside [0, 1].
    """
    t_values = list(t_values) if t_values is not None else t_grid()
    half = DensityMatrix.maximally_mixed(2)
    rows = []
    for t in t_values:
        bound = entropic_bound(t)
        rho = MessageDistribution.from_gamma0(2.0 ** -t).density()
        computed = max(
            trace_distance(xi_superoperator(theta, r, rho), half)
            for theta in theta_grid(theta_points)
            for r in (0, 1)
        )
        rows.append({'t': t, 'computed': computed, 'bound': bound, 'abs_diff': abs(computed - bound)})
    return rows


def avg_states_rows(theta_points: int = THETA_GRID) -> list[dict]:
    """Max-norm deviations of averaged ciphertext states from I/2 and I/4."""
    half = DensityMatrix.maximally_mixed(2)
    quarter = DensityMatrix.maximally_mixed(4)
    rows = []
    for theta in theta_grid(theta_points):
        rows.append({
            'theta': theta,
            'dev_msg_b0': avg_message_cipher_state(0, theta).max_deviation(half),
            'dev_msg_b1': avg_message_cipher_state(1, theta).max_deviation(half),
            'dev_joint_b0': avg_joint_cipher_state(0, theta, average_s=True).max_deviation(quarter),
            'dev_joint_b1': avg_joint_cipher_state(1, theta, average_s=True).max_deviation(quarter),
        })
    return rows


def ind_channel_rows(theta_points: int = THETA_GRID) -> list[dict]:
    """Gaps of the s-averaged IND channel for classical and entangled inputs.

    The entangled column is exploratory and carries no pass/fail verdict.
    """
    rows = []
    for theta in theta_grid(theta_points):
        rows.append({
            'theta': theta,
            'classical_gap': classical_channel_gap(1, theta),
            'entangled_gap': entangled_channel_gap(theta),
        })
    return rows


def build_report(name: str, t_values: Optional[Sequence[float]] = None,
                 points: int = DEFAULT_CURVE_POINTS, theta_points: int = THETA_GRID) -> list[dict]:
    """Dispatch to the named report.

    Raises:
        ValueError: For an unknown report name.
        DomainError: For an invalid grid.
    """
    if name == 'entropic-curve':
        return entropic_curve_rows(t_values if t_values is not None else t_grid(points), theta_points)
    if name == 'avg-states':
        return avg_states_rows(theta_points)
    if name == 'ind-channel':
        return ind_channel_rows(theta_points)
    raise ValueError(f"Unknown report {name!r}; choose from {list(REPORTS)}")


def _cell(value) -> str:
    if isinstance(value, float):
        return f'{value:.6e}' if value and abs(value) < 1e-3 else f'{value:.6f}'
    return str(value)


def format_table(rows: list[dict]) -> str:
    """Render rows as right-aligned columns under a header line."""
    if not rows:
        return ''
    headers = list(rows[0])
    cells = [[_cell(row[h]) for h in headers] for row in rows]
    widths = [max(len(h), *(len(c[i]) for c in cells)) for i, h in enumerate(headers)]
    lines = ['  '.join(h.rjust(w) for h, w in zip(headers, widths))]
    lines.extend('  '.join(c.rjust(w) for c, w in zip(line, widths)) for line in cells)
    return '\n'.join(lines) + '\n'
