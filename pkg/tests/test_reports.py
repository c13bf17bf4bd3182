"""Unit tests for the analysis reports."""

import pytest


class TestGrids:
    """Tests for theta_grid and t_grid."""

    def test_theta_grid_spacing(self):
        """Test that the grid starts at 0 and stays below 2*pi."""
        import math

        from src.reports import theta_grid

        grid = theta_grid(4)
        assert grid == pytest.approx([0.0, math.pi / 2, math.pi, 3 * math.pi / 2])

    def test_t_grid_includes_endpoints(self):
        """Test that the default curve runs from 0 to 1 inclusive."""
        from src.reports import DEFAULT_CURVE_POINTS, t_grid

        grid = t_grid()
        assert len(grid) == DEFAULT_CURVE_POINTS
        assert grid[0] == 0.0 and grid[-1] == 1.0

    @pytest.mark.parametrize('call', [lambda g: g.theta_grid(0), lambda g: g.t_grid(1)])
    def test_rejects_degenerate_grids(self, call):
        """Test that empty grids raise DomainError."""
        from src import reports
        from src.exceptions import DomainError

        with pytest.raises(DomainError):
            call(reports)


class TestEntropicCurve:
    """Tests for entropic_curve_rows."""

    def test_computed_matches_bound(self):
        """Test abs_diff < 1e-10 on the default curve."""
        from src.reports import entropic_curve_rows

        rows = entropic_curve_rows(theta_points=16)
        assert len(rows) == 11
        assert all(row['abs_diff'] < 1e-10 for row in rows)

    def test_columns(self):
        """Test the column order."""
        from src.reports import entropic_curve_rows

        assert list(entropic_curve_rows([0.5], theta_points=4)[0]) == ['t', 'computed', 'bound', 'abs_diff']

    def test_rejects_t_above_one(self):
        """Test that t = 1.2 raises DomainError."""
        from src.exceptions import DomainError
        from src.reports import entropic_curve_rows

        with pytest.raises(DomainError):
            entropic_curve_rows([1.2])


class TestAvgStates:
    """Tests for avg_states_rows."""

    def test_all_deviations_vanish(self):
        """Test that every deviation is below 1e-12 on the full grid."""
        from src.reports import avg_states_rows

        rows = avg_states_rows()
        assert len(rows) == 64
        for row in rows:
            assert max(row['dev_msg_b0'], row['dev_msg_b1'], row['dev_joint_b0'], row['dev_joint_b1']) < 1e-12


class TestIndChannel:
    """Tests for ind_channel_rows."""

    def test_classical_column_vanishes(self):
        """Test that the classical gap is below 1e-12 and the entangled gap is positive."""
        from src.reports import ind_channel_rows

        for row in ind_channel_rows(8):
            assert row['classical_gap'] < 1e-12
            assert row['entangled_gap'] > 0.0


class TestBuildReport:
    """Tests for build_report."""

    def test_dispatches_by_name(self):
        """Test that every known report name yields rows."""
        from src.reports import REPORTS, build_report

        for name in REPORTS:
            assert build_report(name, theta_points=4)

    def test_custom_t_values(self):
        """Test that explicit t values override the default curve."""
        from src.reports import build_report

        rows = build_report('entropic-curve', t_values=[0.0, 1.0], theta_points=4)
        assert [row['t'] for row in rows] == [0.0, 1.0]

    def test_unknown_report(self):
        """Test that an unknown report name raises ValueError."""
        from src.reports import build_report

        with pytest.raises(ValueError, match='Unknown report'):
            build_report('nope')


class TestFormatTable:
    """Tests for format_table."""

    def test_right_aligned_columns(self):
        """Test header and cell alignment."""
        from src.reports import format_table

        text = format_table([{'t': 0.5, 'name': 'a'}, {'t': 1.0, 'name': 'long'}])
        lines = text.splitlines()
        assert lines == [
            '       t  name',
            '0.500000     a',
            '1.000000  long',
        ]
        assert text.endswith('\n')

    def test_small_values_use_exponent(self):
        """Test that tiny non-zero floats are printed in scientific notation."""
        from src.reports import format_table

        text = format_table([{'x': 1e-14}, {'x': 0.0}])
        assert '1.000000e-14' in text
        assert '0.000000' in text

    def test_empty_rows(self):
        """Test that no rows render as the empty string."""
        from src.reports import format_table

        assert format_table([]) == ''

    def test_deterministic(self):
        """Test that equal arguments render identical text."""
        from src.reports import build_report, format_table

        assert format_table(build_report('avg-states', theta_points=8)) == \
            format_table(build_report('avg-states', theta_points=8))
