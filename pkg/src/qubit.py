"""Exact complex linear algebra for one-qubit states and small density matrices.

This module provides the value types every other module builds on:

- PureState: a normalized 2-dimensional state vector.
- Unitary2: a 2x2 complex matrix used as a single-qubit gate.
- DensityMatrix: a Hermitian, trace-1, positive semidefinite matrix of
  dimension 2, 4 or 8 (at most three qubits).

All values are immutable after construction. Measurement comes in two flavours:
measure_computational() is deterministic and only succeeds on (near) basis
states, while sample_measure() draws a Born-rule outcome from a caller-owned
numpy Generator.

Eigenvalues are computed in closed form for 2x2 matrices and with a cyclic
complex Jacobi iteration for 4x4 and 8x8 matrices, so that trace distances are
reproducible independently of the LAPACK build.
"""

import logging
import math
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Sequence, Union

import numpy as np

from src.config import MEASURE_TOL
from src.exceptions import (
    AmbiguousStateError,
    DimensionError,
    NonUnitaryError,
)

logger = logging.getLogger(__name__)

NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
EIGENVALUE_FLOOR = -1e-10
UNITARY_DEFECT_TOL = 1e-9
JACOBI_TOL = 1e-13
JACOBI_MAX_SWEEPS = 100
SUPPORTED_DIMS = (2, 4, 8)

Bit = int


def check_bit(value: int, name: str = 'bit') -> int:
    """Validate that a value is a classical bit.

    Args:
        value: Value to check.
        name: Name used in the error message.

    Returns:
        The value as a plain int.

    Raises:
        ValueError: If the value is not 0 or 1.
    """
    if isinstance(value, bool) or value not in (0, 1):
        raise ValueError(f"{name} must be 0 or 1, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class PureState:
    """A normalized single-qubit state amp0|0> + amp1|1>."""

    amp0: complex
    amp1: complex

    def __post_init__(self):
        amp0 = complex(self.amp0)
        amp1 = complex(self.amp1)
        if not all(math.isfinite(x) for x in (amp0.real, amp0.imag, amp1.real, amp1.imag)):
            raise ValueError("PureState amplitudes must be finite")
        norm = abs(amp0) ** 2 + abs(amp1) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise ValueError(f"PureState is not normalized: |amp0|^2 + |amp1|^2 = {norm!r}")
        object.__setattr__(self, 'amp0', amp0)
        object.__setattr__(self, 'amp1', amp1)

    @classmethod
    def basis(cls, b: int) -> 'PureState':
        """Return the computational basis state |b>."""
        check_bit(b)
        return cls(1.0, 0.0) if b == 0 else cls(0.0, 1.0)

    @classmethod
    def from_vector(cls, vector: Sequence[complex]) -> 'PureState':
        """Build a state from a length-2 vector."""
        if len(vector) != 2:
            raise DimensionError(f"PureState needs 2 amplitudes, got {len(vector)}")
        return cls(complex(vector[0]), complex(vector[1]))

    @property
    def vector(self) -> np.ndarray:
        """The state as a complex column vector of shape (2,)."""
        return np.array([self.amp0, self.amp1], dtype=complex)

    def probabilities(self) -> tuple[float, float]:
        """Return the computational-basis probabilities (p0, p1)."""
        return abs(self.amp0) ** 2, abs(self.amp1) ** 2


@dataclass(frozen=True, eq=False)
class Unitary2:
    """A 2x2 complex matrix intended to be unitary.

    Unitarity is checked where the matrix is applied (see apply()), not at
    construction, so that defective matrices can be represented and rejected.
    The defect is computed once per instance.
    """

    entries: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.entries, dtype=complex)
        if matrix.shape != (2, 2):
            raise DimensionError(f"Unitary2 needs a 2x2 matrix, got shape {matrix.shape}")
        if not np.all(np.isfinite(matrix)):
            raise ValueError("Unitary2 entries must be finite")
        matrix.setflags(write=False)
        object.__setattr__(self, 'entries', matrix)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Unitary2):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())

    @classmethod
    def identity(cls) -> 'Unitary2':
        return cls(np.eye(2, dtype=complex))

    @cached_property
    def coefficients(self) -> tuple[complex, complex, complex, complex]:
        """Entries (u00, u01, u10, u11) as Python complex numbers."""
        (u00, u01), (u10, u11) = self.entries.tolist()
        return u00, u01, u10, u11

    @cached_property
    def _defect(self) -> float:
        u = self.entries
        eye = np.eye(2)
        return float(max(
            np.max(np.abs(u.conj().T @ u - eye)),
            np.max(np.abs(u @ u.conj().T - eye)),
        ))

    def unitarity_defect(self) -> float:
        """Largest entrywise deviation of U^dagger U and U U^dagger from I."""
        return self._defect

    def is_unitary(self, tol: float = NORM_TOL) -> bool:
        return self.unitarity_defect() <= tol


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """A density matrix on 1, 2 or 3 qubits.

    Attributes:
        entries: Read-only dim x dim complex matrix.
    """

    entries: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.entries, dtype=complex)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise DimensionError(f"DensityMatrix needs a square matrix, got shape {matrix.shape}")
        if matrix.shape[0] not in SUPPORTED_DIMS:
            raise DimensionError(
                f"DensityMatrix dimension must be one of {SUPPORTED_DIMS}, got {matrix.shape[0]}"
            )
        hermitian_defect = float(np.max(np.abs(matrix - matrix.conj().T)))
        if hermitian_defect > HERMITIAN_TOL:
            raise ValueError(f"DensityMatrix is not Hermitian (defect {hermitian_defect:.3e})")
        trace = complex(np.trace(matrix))
        if abs(trace - 1.0) > TRACE_TOL:
            raise ValueError(f"DensityMatrix trace must be 1, got {trace!r}")
        smallest = float(hermitian_eigenvalues(matrix)[0])
        if smallest < EIGENVALUE_FLOOR:
            raise ValueError(f"DensityMatrix has negative eigenvalue {smallest:.3e}")
        matrix.setflags(write=False)
        object.__setattr__(self, 'entries', matrix)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, DensityMatrix):
            return NotImplemented
        return bool(np.array_equal(self.entries, other.entries))

    def __hash__(self) -> int:
        return hash(self.entries.tobytes())

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    @classmethod
    def from_pure(cls, psi: PureState) -> 'DensityMatrix':
        """Return the projector |psi><psi|."""
        v = psi.vector
        return cls(np.outer(v, v.conj()))

    @classmethod
    def maximally_mixed(cls, dim: int = 2) -> 'DensityMatrix':
        """Return I/dim."""
        return cls(np.eye(dim, dtype=complex) / dim)

    @classmethod
    def diagonal(cls, probabilities: Iterable[float]) -> 'DensityMatrix':
        """Return the classical state diag(p_0, ..., p_{d-1})."""
        return cls(np.diag(np.array(list(probabilities), dtype=complex)))

    def eigenvalues(self) -> np.ndarray:
        """Eigenvalues in ascending order."""
        return hermitian_eigenvalues(self.entries)

    def max_deviation(self, other: Union['DensityMatrix', np.ndarray]) -> float:
        """Max-norm distance between the entries of two matrices of equal size."""
        target = other.entries if isinstance(other, DensityMatrix) else np.asarray(other)
        if target.shape != self.entries.shape:
            raise DimensionError(f"Shape mismatch: {self.entries.shape} vs {target.shape}")
        return float(np.max(np.abs(self.entries - target)))


def _off_diagonal_norm(m: np.ndarray) -> float:
    off = m - np.diag(np.diag(m))
    return float(np.sqrt(np.sum(np.abs(off) ** 2)))


def _closed_form_eigenvalues(m: np.ndarray) -> np.ndarray:
    a = m[0, 0].real
    d = m[1, 1].real
    mean = (a + d) / 2
    radius = math.hypot((a - d) / 2, abs(m[0, 1]))
    return np.array([mean - radius, mean + radius])


def _jacobi_eigenvalues(m: np.ndarray) -> np.ndarray:
    # Each rotation V = D R first makes a[p, q] real with the phase D, then
    # zeroes it with a real Givens rotation R.
    a = np.array(m, dtype=complex)
    n = a.shape[0]
    for _ in range(JACOBI_MAX_SWEEPS):
        if _off_diagonal_norm(a) < JACOBI_TOL:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                r = abs(apq)
                if r == 0.0:
                    continue
                phase = apq / r
                tau = (a[q, q].real - a[p, p].real) / (2 * r)
                t = (1.0 if tau >= 0 else -1.0) / (abs(tau) + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                v = np.eye(n, dtype=complex)
                v[p, p] = c
                v[p, q] = s
                v[q, p] = -s * phase.conjugate()
                v[q, q] = c * phase.conjugate()
                a = v.conj().T @ a @ v
    else:
        logger.warning(
            f"Jacobi iteration stopped after {JACOBI_MAX_SWEEPS} sweeps "
            f"(off-diagonal norm {_off_diagonal_norm(a):.3e})"
        )
    return np.sort(np.real(np.diag(a)))


def hermitian_eigenvalues(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in ascending order.

    Args:
        m: Square Hermitian matrix of dimension 2, 4 or 8.

    Returns:
        Real eigenvalues sorted ascending.

    Raises:
        DimensionError: If the matrix is not square or has unsupported size.
    """
    matrix = np.asarray(m, dtype=complex)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"Expected a square matrix, got shape {matrix.shape}")
    if matrix.shape[0] == 1:
        return np.array([matrix[0, 0].real])
    if matrix.shape[0] == 2:
        return _closed_form_eigenvalues(matrix)
    if matrix.shape[0] not in SUPPORTED_DIMS:
        raise DimensionError(f"Unsupported dimension {matrix.shape[0]}")
    return _jacobi_eigenvalues(matrix)


def apply(u: Unitary2, psi: PureState) -> PureState:
    """Apply a single-qubit unitary to a pure state.

    Args:
        u: Unitary to apply.
        psi: Input state.

    Returns:
        The state u|psi>, renormalized.

    Raises:
        NonUnitaryError: If the unitarity defect of u exceeds 1e-9.
    """
    defect = u.unitarity_defect()
    if defect > UNITARY_DEFECT_TOL:
        raise NonUnitaryError(f"Matrix is not unitary (defect {defect:.3e})")
    u00, u01, u10, u11 = u.coefficients
    out0 = u00 * psi.amp0 + u01 * psi.amp1
    out1 = u10 * psi.amp0 + u11 * psi.amp1
    norm = math.sqrt(abs(out0) ** 2 + abs(out1) ** 2)
    return PureState(out0 / norm, out1 / norm)


@lru_cache(maxsize=4096)
def dagger(u: Unitary2) -> Unitary2:
    """Return the conjugate transpose of u."""
    return Unitary2(u.entries.conj().T)


def measure_computational(psi: PureState, tol: float = MEASURE_TOL) -> int:
    """Measure in the computational basis when the outcome is certain.

    Models a measurement that succeeds with probability 1; no randomness is
    consumed.

    Args:
        psi: State to measure.
        tol: Allowed probability deficit of the certain outcome.

    Returns:
        The bit b with |amp_b|^2 >= 1 - tol.

    Raises:
        AmbiguousStateError: If neither outcome is certain within tol.
    """
    p0, p1 = psi.probabilities()
    if p0 >= 1.0 - tol:
        return 0
    if p1 >= 1.0 - tol:
        return 1
    raise AmbiguousStateError(p0, p1, tol)


def sample_measure(psi: PureState, rng: np.random.Generator) -> int:
    """Sample a computational-basis outcome by the Born rule."""
    _, p1 = psi.probabilities()
    return 1 if rng.random() < p1 else 0


def tensor(a: DensityMatrix, b: DensityMatrix) -> DensityMatrix:
    """Kronecker product a (x) b.

    Raises:
        DimensionError: If the product dimension exceeds 8.
    """
    if a.dim * b.dim > SUPPORTED_DIMS[-1]:
        raise DimensionError(f"Tensor product dimension {a.dim * b.dim} exceeds {SUPPORTED_DIMS[-1]}")
    return DensityMatrix(np.kron(a.entries, b.entries))


def partial_trace(rho: DensityMatrix, dims: Sequence[int], keep: Union[int, Sequence[int]]) -> DensityMatrix:
    """Trace out every subsystem not listed in keep.

    Args:
        rho: State on subsystems with dimensions dims (in tensor order).
        dims: Subsystem dimensions; their product must equal rho.dim.
        keep: Index or indices of the subsystems to keep.

    Returns:
        The reduced density matrix on the kept subsystems, in their original order.
    """
    dims = tuple(int(d) for d in dims)
    if math.prod(dims) != rho.dim:
        raise DimensionError(f"Subsystem dims {dims} do not multiply to {rho.dim}")
    kept = sorted({keep} if isinstance(keep, int) else set(keep))
    if not kept or any(not 0 <= k < len(dims) for k in kept):
        raise ValueError(f"Invalid subsystems to keep: {keep!r}")

    tensor_form = rho.entries.reshape(dims + dims)
    remaining = len(dims)
    for index in sorted(set(range(len(dims))) - set(kept), reverse=True):
        tensor_form = np.trace(tensor_form, axis1=index, axis2=index + remaining)
        remaining -= 1
    kept_dim = math.prod(dims[k] for k in kept)
    return DensityMatrix(tensor_form.reshape(kept_dim, kept_dim))


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """Trace distance 1/2 * sum |eigenvalues(a - b)|.

    Raises:
        DimensionError: If the dimensions differ.
    """
    if a.dim != b.dim:
        raise DimensionError(f"Dimension mismatch: {a.dim} vs {b.dim}")
    return 0.5 * float(np.sum(np.abs(hermitian_eigenvalues(a.entries - b.entries))))
