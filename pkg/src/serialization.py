"""Text serialization of master secrets, function keys and ciphertexts.

Records are versioned JSON documents. Floats are written with Python's
shortest round-trip representation (at most 17 significant digits), so
parse(serialize(x)) reproduces every amplitude bit-exactly.

Bitstrings are stored as zero-padded hex of their big-endian integer value;
the bit length is always stored alongside (lambda for keys, Q for s).

NOTE: ciphertext amplitudes are stored raw. These files are simulator
artifacts and give no confidentiality whatsoever.
"""

import hashlib
import json
import logging
import math
import re
from typing import Any

from src.exceptions import ParseError
from src.hfe import FunctionKey, HfeCiphertext, MasterSecret, SchemeParams, position_angle
from src.qubit import PureState
from src.xi_cipher import XiCiphertext

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
ANGLE_TOL = 1e-12
_HEX_DIGITS = re.compile(r'[0-9a-f]*')

KIND_MASTER_SECRET = 'master-secret'
KIND_FUNCTION_KEY = 'function-key'
KIND_CIPHERTEXT = 'ciphertext'


def bits_to_hex(bits: str) -> str:
    """Encode a bitstring as zero-padded lowercase hex (ceil(n/4) digits)."""
    if not bits:
        return ''
    return format(int(bits, 2), f'0{math.ceil(len(bits) / 4)}x')


def hex_to_bits(text: str, n: int) -> str:
    """Decode the canonical bits_to_hex form into a bitstring of exactly n bits.

    The text must be exactly ceil(n/4) lowercase hex digits.

    Raises:
        ParseError: If the text is not in canonical form or does not fit in n bits.
    """
    width = math.ceil(n / 4)
    if not isinstance(text, str) or len(text) != width or not _HEX_DIGITS.fullmatch(text):
        raise ParseError(f"Expected {width} lowercase hex digits for {n} bits, got {text!r}")
    value = int(text, 16) if text else 0
    if value >= 2 ** n:
        raise ParseError(f"Hex value {text!r} does not fit in {n} bits")
    return format(value, f'0{n}b')


def _dump(record: dict) -> str:
    return json.dumps(record, indent=2) + '\n'


def _load(text: str, kind: str) -> dict:
    try:
        record = json.loads(text)
    except json.JSONDecodeError as e:
        raise ParseError(f"Not a JSON document: {e}") from e
    if not isinstance(record, dict):
        raise ParseError("Top-level JSON value must be an object")
    if record.get('version') != FORMAT_VERSION:
        raise ParseError(f"Unsupported format version {record.get('version')!r}")
    if record.get('kind') != kind:
        raise ParseError(f"Expected a {kind} record, got {record.get('kind')!r}")
    return record


def _field(record: dict, name: str) -> Any:
    try:
        return record[name]
    except KeyError as e:
        raise ParseError(f"Missing field {name!r}") from e


def _state_to_list(psi: PureState) -> list[float]:
    return [psi.amp0.real, psi.amp0.imag, psi.amp1.real, psi.amp1.imag]


def _state_from_list(values: Any) -> PureState:
    if not isinstance(values, list) or len(values) != 4:
        raise ParseError(f"Amplitude record must be a list of 4 floats, got {values!r}")
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        raise ParseError(f"Amplitude record must hold numbers, got {values!r}")
    re0, im0, re1, im1 = (float(v) for v in values)
    return PureState(complex(re0, im0), complex(re1, im1))


def serialize_master_secret(msk: MasterSecret) -> str:
    """Serialize a master secret in its efficient form."""
    return _dump({
        'version': FORMAT_VERSION,
        'kind': KIND_MASTER_SECRET,
        'lambda': msk.params.lam,
        'Q': msk.params.Q,
        's': bits_to_hex(msk.s),
        'designated_keys': [bits_to_hex(k) for k in msk.designated_keys],
        'eta': list(msk.eta),
    })


def parse_master_secret(text: str) -> MasterSecret:
    """Parse a serialized master secret.

    Raises:
        ParseError: On malformed records or violated invariants.
    """
    record = _load(text, KIND_MASTER_SECRET)
    try:
        params = SchemeParams(lam=int(_field(record, 'lambda')), Q=int(_field(record, 'Q')))
        keys = _field(record, 'designated_keys')
        if not isinstance(keys, list):
            raise ParseError("designated_keys must be a list")
        return MasterSecret(
            params=params,
            s=hex_to_bits(_field(record, 's'), params.Q),
            designated_keys=tuple(hex_to_bits(k, params.lam) for k in keys),
            eta=tuple(_field(record, 'eta')),
        )
    except ParseError:
        raise
    except (TypeError, ValueError) as e:
        raise ParseError(f"Invalid master secret: {e}") from e


def serialize_function_key(fk: FunctionKey) -> str:
    """Serialize a function key."""
    return _dump({
        'version': FORMAT_VERSION,
        'kind': KIND_FUNCTION_KEY,
        'Q': fk.Q,
        'q': fk.q,
        'prefix': fk.prefix,
    })


def parse_function_key(text: str) -> FunctionKey:
    """Parse a serialized function key.

    Raises:
        ParseError: On malformed records or an inconsistent q.
    """
    record = _load(text, KIND_FUNCTION_KEY)
    try:
        fk = FunctionKey(prefix=_field(record, 'prefix'), Q=int(_field(record, 'Q')))
    except (TypeError, ValueError) as e:
        raise ParseError(f"Invalid function key: {e}") from e
    if _field(record, 'q') != fk.q:
        raise ParseError(f"Field q={record['q']!r} disagrees with the prefix length {fk.q}")
    return fk


def serialize_ciphertext(ct: HfeCiphertext) -> str:
    """Serialize a ciphertext with one record per block."""
    return _dump({
        'version': FORMAT_VERSION,
        'kind': KIND_CIPHERTEXT,
        'Q': ct.Q,
        'blocks': [
            {
                'j': j,
                'theta': position_angle(j, ct.Q),
                'c0': _state_to_list(block.c0),
                'c1': _state_to_list(block.c1),
            }
            for j, block in enumerate(ct.blocks, start=1)
        ],
    })


def parse_ciphertext(text: str) -> HfeCiphertext:
    """Parse a serialized ciphertext.

    Raises:
        ParseError: On malformed records, a block count that disagrees with
                    Q, or amplitudes off the Bloch equator.
    """
    record = _load(text, KIND_CIPHERTEXT)
    blocks = _field(record, 'blocks')
    Q = _field(record, 'Q')
    if not isinstance(blocks, list) or not isinstance(Q, int) or len(blocks) != Q:
        raise ParseError(f"Block count does not match Q={Q!r}")
    parsed = []
    try:
        for j, block in enumerate(blocks, start=1):
            if _field(block, 'j') != j:
                raise ParseError(f"Block {j} is out of order (j={block['j']!r})")
            if abs(float(_field(block, 'theta')) - position_angle(j, Q)) > ANGLE_TOL:
                raise ParseError(f"Block {j} angle disagrees with 2*pi*{j}/{Q}")
            parsed.append(XiCiphertext(
                c0=_state_from_list(_field(block, 'c0')),
                c1=_state_from_list(_field(block, 'c1')),
            ))
        return HfeCiphertext(tuple(parsed))
    except ParseError:
        raise
    except (TypeError, ValueError) as e:
        raise ParseError(f"Invalid ciphertext: {e}") from e


def msk_fingerprint(msk: MasterSecret) -> str:
    """Short SHA-256 fingerprint of a master secret, safe to export.

    Hashes the fields of the master-secret record joined with separators.
    """
    canonical = '|'.join((
        str(msk.params.lam), str(msk.params.Q), msk.s,
        ','.join(msk.designated_keys), ','.join(map(str, msk.eta)),
    ))
    return hashlib.sha256(canonical.encode('utf-8')).hexdigest()[:16]
