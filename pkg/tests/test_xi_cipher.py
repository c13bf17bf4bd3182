"""Unit tests for the one-qubit cipher."""

import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

SQRT_HALF = 1 / math.sqrt(2)
GRID = [2 * math.pi * i / 64 for i in range(64)]


def grid_and_random_angles():
    rng = np.random.default_rng(2024)
    return GRID + list(rng.uniform(0, 2 * math.pi, 1000))


def column(theta, u, v):
    """H^theta_u|v> from the column formula (1, (-1)^(u xor v) e^{i theta}) / sqrt(2)."""
    sign = -1 if u ^ v else 1
    return np.array([SQRT_HALF, sign * cmath.exp(1j * theta) * SQRT_HALF])


class TestCanonicalAngle:
    """Tests for canonical_angle."""

    @pytest.mark.parametrize('theta, expected', [
        (0.0, 0.0),
        (2 * math.pi, 0.0),
        (-math.pi / 2, 3 * math.pi / 2),
        (5 * math.pi, math.pi),
    ])
    def test_reduces_into_half_open_range(self, theta, expected):
        """Test reduction mod 2*pi."""
        from src.xi_cipher import canonical_angle

        assert canonical_angle(theta) == pytest.approx(expected, abs=1e-12)

    def test_tiny_negative_angle_stays_below_two_pi(self):
        """Test that -1e-17 does not map to exactly 2*pi."""
        from src.xi_cipher import TWO_PI, canonical_angle

        assert 0.0 <= canonical_angle(-1e-17) < TWO_PI

    @pytest.mark.parametrize('theta', [math.inf, math.nan])
    def test_rejects_non_finite(self, theta):
        """Test that infinite and NaN angles raise ValueError."""
        from src.xi_cipher import canonical_angle

        with pytest.raises(ValueError, match='finite'):
            canonical_angle(theta)

    def test_context_canonicalizes(self):
        """Test that XiContext stores the reduced angle."""
        from src.xi_cipher import XiContext

        assert XiContext(1, 2 * math.pi + 1.0).theta == pytest.approx(1.0)


class TestHMap:
    """Tests for h_map."""

    def test_hadamard_at_zero(self):
        """Test that H^0_0 is the Hadamard matrix."""
        from src.xi_cipher import h_map

        assert np.allclose(h_map(0.0, 0).entries, np.array([[1, 1], [1, -1]]) * SQRT_HALF, atol=1e-15)

    def test_pi_with_u_one_is_hadamard(self):
        """Test that (-1)^1 e^{i pi} = 1 turns H^pi_1 into the Hadamard matrix."""
        from src.xi_cipher import h_map

        assert np.allclose(h_map(math.pi, 1).entries, np.array([[1, 1], [1, -1]]) * SQRT_HALF, atol=1e-15)

    def test_quarter_turn(self):
        """Test H^{pi/2}_0 = [[1, 1], [i, -i]] / sqrt(2)."""
        from src.xi_cipher import h_map

        assert np.allclose(h_map(math.pi / 2, 0).entries, np.array([[1, 1], [1j, -1j]]) * SQRT_HALF, atol=1e-15)

    def test_unitary_over_grid(self):
        """Test unitarity within 1e-12 on the grid and 1000 random angles."""
        from src.xi_cipher import h_map

        for theta in grid_and_random_angles():
            for u in (0, 1):
                assert h_map(theta, u).is_unitary(1e-12)

    def test_symmetry_and_shift_identities(self):
        """Test H_u|v> = H_v|u> and H_u|b> = H_{u xor b}|0> within 1e-12."""
        from src.qubit import PureState, apply
        from src.xi_cipher import h_map

        for theta in grid_and_random_angles():
            for u in (0, 1):
                for v in (0, 1):
                    uv = apply(h_map(theta, u), PureState.basis(v)).vector
                    vu = apply(h_map(theta, v), PureState.basis(u)).vector
                    shifted = apply(h_map(theta, u ^ v), PureState.basis(0)).vector
                    assert np.max(np.abs(uv - vu)) < 1e-12
                    assert np.max(np.abs(uv - shifted)) < 1e-12
                    assert np.max(np.abs(uv - column(theta, u, v))) < 1e-12

    def test_mismatched_secret_gives_bit_flip(self):
        """Test that (H^theta_0)^dagger H^theta_1 is the Pauli X matrix."""
        from src.qubit import dagger
        from src.xi_cipher import h_map

        for theta in GRID:
            product = dagger(h_map(theta, 0)).entries @ h_map(theta, 1).entries
            assert np.allclose(product, np.array([[0, 1], [1, 0]]), atol=1e-12)


class TestQenc:
    """Tests for qenc and qenc_with_r."""

    def test_all_zero_context(self):
        """Test s=0, theta=0, b=0, r=0 gives c0 = c1 = (|0> + |1>)/sqrt(2)."""
        from src.xi_cipher import XiContext, qenc_with_r

        ct = qenc_with_r(XiContext(0, 0.0), 0, 0)
        for qubit in (ct.c0, ct.c1):
            assert np.allclose(qubit.vector, [SQRT_HALF, SQRT_HALF], atol=1e-12)
        assert ct.qubit_count == 2

    def test_column_formula_example(self):
        """Test s=1, theta=pi/2, b=0, r=1 against the column formula."""
        from src.xi_cipher import XiContext, qenc_with_r

        ct = qenc_with_r(XiContext(1, math.pi / 2), 0, 1)
        assert np.allclose(ct.c0.vector, [SQRT_HALF, 1j * SQRT_HALF], atol=1e-12)
        assert np.allclose(ct.c1.vector, [SQRT_HALF, -1j * SQRT_HALF], atol=1e-12)

    def test_ciphertext_on_equator(self):
        """Test that XiCiphertext rejects a qubit off the Bloch equator."""
        from src.qubit import PureState
        from src.xi_cipher import XiCiphertext

        with pytest.raises(ValueError, match='equator'):
            XiCiphertext(PureState.basis(0), PureState(SQRT_HALF, SQRT_HALF))

    def test_r_is_roughly_uniform(self):
        """Test that qenc draws r = 0 and r = 1 with similar frequency."""
        from src.qubit import PureState, apply, dagger, measure_computational
        from src.xi_cipher import XiContext, h_map, qenc

        ctx = XiContext(0, 0.3)
        rng = np.random.default_rng(9)
        n = 4000
        ones = 0
        for _ in range(n):
            ct = qenc(ctx, 1, rng)
            ones += measure_computational(apply(dagger(h_map(ctx.theta, ctx.s)), ct.c0))
        assert abs(ones / n - 0.5) <= 4 / math.sqrt(n)


class TestQdec:
    """Tests for qdec."""

    def test_exhaustive_correctness(self):
        """Test qdec(qenc_with_r) = b over all (s, b, r) and 1064 angles."""
        from src.xi_cipher import XiContext, qdec, qenc_with_r

        for theta in grid_and_random_angles():
            for s in (0, 1):
                ctx = XiContext(s, theta)
                for b in (0, 1):
                    for r in (0, 1):
                        assert qdec(ctx, qenc_with_r(ctx, b, r)) == b

    @given(
        theta=st.floats(min_value=-100.0, max_value=100.0, allow_nan=False),
        s=st.integers(0, 1),
        b=st.integers(0, 1),
        seed=st.integers(0, 2 ** 32 - 1),
    )
    def test_randomized_round_trip(self, theta, s, b, seed):
        """Test qdec(qenc) = b for arbitrary finite angles."""
        from src.xi_cipher import XiContext, qdec, qenc

        ctx = XiContext(s, theta)
        assert qdec(ctx, qenc(ctx, b, np.random.default_rng(seed))) == b

    def test_wrong_secret_bit_flips_plaintext(self):
        """Test that decrypting with the other s returns the complement."""
        from src.xi_cipher import XiContext, qdec, qenc_with_r

        for theta in GRID:
            for b in (0, 1):
                for r in (0, 1):
                    ct = qenc_with_r(XiContext(0, theta), b, r)
                    assert qdec(XiContext(1, theta), ct) == 1 - b

    def test_wrong_angle_is_ambiguous(self):
        """Test that decrypting at theta + pi/3 raises AmbiguousStateError."""
        from src.exceptions import AmbiguousStateError
        from src.xi_cipher import XiContext, qdec, qenc_with_r

        ct = qenc_with_r(XiContext(0, 0.4), 1, 0)
        with pytest.raises(AmbiguousStateError) as exc_info:
            qdec(XiContext(0, 0.4 + math.pi / 3), ct)
        assert sorted([exc_info.value.p0, exc_info.value.p1]) == pytest.approx([0.25, 0.75], abs=1e-12)
