"""Unit tests for the text serialization layer."""

import json

import numpy as np
import pytest


def make_msk(lam=4, Q=8, seed=0, eta=None):
    from src.hfe import SchemeParams, setup

    return setup(SchemeParams(lam=lam, Q=Q), eta=eta, rng=np.random.default_rng(seed))


class TestHexBits:
    """Tests for bits_to_hex and hex_to_bits."""

    def test_zero_padded(self):
        """Test that 8 bits give two hex digits and 5 bits give two."""
        from src.serialization import bits_to_hex

        assert bits_to_hex('00000001') == '01'
        assert bits_to_hex('10000') == '10'

    def test_decodes_with_length(self):
        """Test that hex decodes back to exactly n bits."""
        from src.serialization import hex_to_bits

        assert hex_to_bits('5', 4) == '0101'
        assert hex_to_bits('1f', 5) == '11111'
        assert hex_to_bits('0a', 8) == '00001010'

    @pytest.mark.parametrize('text', ['zz', '0x', '-1', ' 1', '', '1_', 'AB', '00a', 'a'])
    def test_rejects_malformed_hex(self, text):
        """Test that anything but two lowercase hex digits is rejected for n = 8."""
        from src.exceptions import ParseError
        from src.serialization import hex_to_bits

        with pytest.raises(ParseError):
            hex_to_bits(text, 8)

    def test_accepts_only_canonical_form(self):
        """Test that hex_to_bits accepts exactly what bits_to_hex emits."""
        from src.exceptions import ParseError
        from src.serialization import bits_to_hex, hex_to_bits

        assert hex_to_bits(bits_to_hex('01011010'), 8) == '01011010'
        for text, n in (('1_', 8), ('05', 4), ('5', 8), ('0A', 8)):
            with pytest.raises(ParseError, match='lowercase hex digits'):
                hex_to_bits(text, n)

    def test_rejects_overflow(self):
        """Test that values not below 2^n are rejected."""
        from src.exceptions import ParseError
        from src.serialization import hex_to_bits

        with pytest.raises(ParseError, match='does not fit'):
            hex_to_bits('20', 5)


class TestMasterSecretRecord:
    """Tests for master-secret serialization."""

    def test_round_trip_many(self):
        """Test parse(serialize(msk)) == msk for 1000 random secrets."""
        from src.serialization import parse_master_secret, serialize_master_secret

        for seed in range(1000):
            msk = make_msk(lam=4 + seed % 3, Q=8, seed=seed, eta='random' if seed % 2 else None)
            assert parse_master_secret(serialize_master_secret(msk)) == msk

    def test_record_fields(self):
        """Test the stored field names and hex encoding."""
        from src.serialization import serialize_master_secret

        msk = make_msk()
        record = json.loads(serialize_master_secret(msk))
        assert record['version'] == 1
        assert record['kind'] == 'master-secret'
        assert record['lambda'] == 4 and record['Q'] == 8
        assert len(record['designated_keys']) == 8
        assert record['eta'] == list(range(1, 9))

    def test_rejects_wrong_kind(self):
        """Test that a function-key record is not accepted as a master secret."""
        from src.exceptions import ParseError
        from src.hfe import FunctionKey
        from src.serialization import parse_master_secret, serialize_function_key

        with pytest.raises(ParseError, match='master-secret'):
            parse_master_secret(serialize_function_key(FunctionKey('01', 4)))

    def test_rejects_invariant_violation(self):
        """Test that duplicated designated keys surface as ParseError."""
        from src.exceptions import ParseError
        from src.serialization import parse_master_secret, serialize_master_secret

        record = json.loads(serialize_master_secret(make_msk()))
        record['designated_keys'][1] = record['designated_keys'][0]
        with pytest.raises(ParseError, match='distinct'):
            parse_master_secret(json.dumps(record))

    def test_rejects_unsupported_version(self):
        """Test that only version 1 is accepted."""
        from src.exceptions import ParseError
        from src.serialization import parse_master_secret, serialize_master_secret

        record = json.loads(serialize_master_secret(make_msk()))
        record['version'] = 2
        with pytest.raises(ParseError, match='version'):
            parse_master_secret(json.dumps(record))

    def test_rejects_non_json(self):
        """Test that arbitrary text is rejected."""
        from src.exceptions import ParseError
        from src.serialization import parse_master_secret

        with pytest.raises(ParseError):
            parse_master_secret('not json')


class TestFunctionKeyRecord:
    """Tests for function-key serialization."""

    @pytest.mark.parametrize('prefix', [None, '1', '0110'])
    def test_round_trip(self, prefix):
        """Test bottom and prefix keys round-trip."""
        from src.hfe import FunctionKey
        from src.serialization import parse_function_key, serialize_function_key

        fk = FunctionKey(prefix, 4)
        assert parse_function_key(serialize_function_key(fk)) == fk

    def test_bottom_record(self):
        """Test that the bottom key is stored with a null prefix and q = 0."""
        from src.hfe import FunctionKey
        from src.serialization import serialize_function_key

        record = json.loads(serialize_function_key(FunctionKey.bottom(8)))
        assert record == {'version': 1, 'kind': 'function-key', 'Q': 8, 'q': 0, 'prefix': None}

    def test_rejects_inconsistent_q(self):
        """Test that q must equal the prefix length."""
        from src.exceptions import ParseError
        from src.serialization import parse_function_key

        text = json.dumps({'version': 1, 'kind': 'function-key', 'Q': 4, 'q': 3, 'prefix': '01'})
        with pytest.raises(ParseError, match='disagrees'):
            parse_function_key(text)


class TestCiphertextRecord:
    """Tests for ciphertext serialization."""

    def test_round_trip_is_bit_exact(self):
        """Test that every amplitude survives 1000 round trips unchanged."""
        from src.hfe import enc
        from src.serialization import parse_ciphertext, serialize_ciphertext

        rng = np.random.default_rng(12)
        msk = make_msk(seed=12)
        for _ in range(1000):
            m = ''.join('1' if x else '0' for x in rng.integers(0, 2, size=8))
            ct = enc(msk, m, rng)
            assert parse_ciphertext(serialize_ciphertext(ct)) == ct

    def test_serialize_is_deterministic(self):
        """Test that serializing twice gives identical text."""
        from src.hfe import enc_with_r
        from src.serialization import serialize_ciphertext

        ct = enc_with_r(make_msk(), '10110101', '01010101')
        assert serialize_ciphertext(ct) == serialize_ciphertext(ct)

    def test_block_count_must_match_q(self):
        """Test that dropping a block is rejected."""
        from src.exceptions import ParseError
        from src.hfe import enc_with_r
        from src.serialization import parse_ciphertext, serialize_ciphertext

        record = json.loads(serialize_ciphertext(enc_with_r(make_msk(), '10110101', '0' * 8)))
        record['blocks'].pop()
        with pytest.raises(ParseError, match='Block count'):
            parse_ciphertext(json.dumps(record))

    def test_rejects_wrong_angle(self):
        """Test that a block angle must equal 2*pi*j/Q."""
        from src.exceptions import ParseError
        from src.hfe import enc_with_r
        from src.serialization import parse_ciphertext, serialize_ciphertext

        record = json.loads(serialize_ciphertext(enc_with_r(make_msk(), '10110101', '0' * 8)))
        record['blocks'][0]['theta'] += 0.1
        with pytest.raises(ParseError, match='angle'):
            parse_ciphertext(json.dumps(record))

    def test_rejects_off_equator_amplitudes(self):
        """Test that a basis state in place of c1 is rejected."""
        from src.exceptions import ParseError
        from src.hfe import enc_with_r
        from src.serialization import parse_ciphertext, serialize_ciphertext

        record = json.loads(serialize_ciphertext(enc_with_r(make_msk(), '10110101', '0' * 8)))
        record['blocks'][2]['c1'] = [1.0, 0.0, 0.0, 0.0]
        with pytest.raises(ParseError, match='equator'):
            parse_ciphertext(json.dumps(record))


class TestFingerprint:
    """Tests for msk_fingerprint."""

    def test_stable_and_distinct(self):
        """Test that equal secrets share a fingerprint and different ones do not."""
        from src.serialization import msk_fingerprint

        assert msk_fingerprint(make_msk(seed=1)) == msk_fingerprint(make_msk(seed=1))
        assert msk_fingerprint(make_msk(seed=1)) != msk_fingerprint(make_msk(seed=2))
        assert len(msk_fingerprint(make_msk())) == 16
