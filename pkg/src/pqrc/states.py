"""Dense exact quantum state engine.

Statevectors and density matrices are stored as dense complex arrays with
qubit 0 mapped to the most significant bit of the basis index, so
``psi.reshape((2,) * n)`` puts qubit ``j`` on tensor axis ``j``.  Gates are
applied through strided tensor kernels (no full 2^N x 2^N operator is ever
formed for 1- and 2-qubit gates).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

# Memory guards: a density matrix costs 16 * 4^N bytes, a statevector 16 * 2^N.
MAX_STATEVECTOR_QUBITS = 20
MAX_DENSITY_QUBITS = 12

NORM_ATOL = 1e-10
HERMITICITY_ATOL = 1e-8


class DimensionError(ValueError):
    """Operand dimensions are inconsistent."""


class NonUnitaryError(ValueError):
    """A gate failed the unitarity check."""


class NonHermitianError(ValueError):
    """A matrix failed the Hermiticity check."""


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass
class StateVector:
    """Pure state of ``n_qubits`` qubits as 2^n complex amplitudes."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_qubits > MAX_STATEVECTOR_QUBITS:
            raise ValueError(
                f"n_qubits={self.n_qubits} outside supported range "
                f"[1, {MAX_STATEVECTOR_QUBITS}]"
            )
        self.amplitudes = np.ascontiguousarray(self.amplitudes, dtype=np.complex128)
        if self.amplitudes.shape != (2**self.n_qubits,):
            raise DimensionError(
                f"expected {2**self.n_qubits} amplitudes, got {self.amplitudes.shape}"
            )

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        """The computational ground state |0...0>."""
        amps = np.zeros(2**n_qubits, dtype=np.complex128)
        amps[0] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def basis(cls, n_qubits: int, index: int) -> "StateVector":
        amps = np.zeros(2**n_qubits, dtype=np.complex128)
        amps[index] = 1.0
        return cls(n_qubits, amps)

    @classmethod
    def random_product(cls, n_qubits: int, rng: np.random.Generator) -> "StateVector":
        """Tensor product of Haar-random single-qubit states."""
        amps = np.array([1.0], dtype=np.complex128)
        for _ in range(n_qubits):
            local = rng.normal(size=2) + 1j * rng.normal(size=2)
            local /= np.linalg.norm(local)
            amps = np.kron(amps, local)
        return cls(n_qubits, amps)

    @classmethod
    def haar_random(cls, n_qubits: int, rng: np.random.Generator) -> "StateVector":
        """Haar-random pure state via normalized complex Gaussian amplitudes."""
        amps = rng.normal(size=2**n_qubits) + 1j * rng.normal(size=2**n_qubits)
        amps /= np.linalg.norm(amps)
        return cls(n_qubits, amps)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check_normalized(self, atol: float = NORM_ATOL) -> None:
        if abs(self.norm() - 1.0) > atol:
            raise ValueError(f"state norm {self.norm()} is not 1 within {atol}")

    def to_density_matrix(self) -> "DensityMatrix":
        if self.n_qubits > MAX_DENSITY_QUBITS:
            raise ValueError(
                f"density matrix for {self.n_qubits} qubits exceeds cap "
                f"{MAX_DENSITY_QUBITS}"
            )
        return DensityMatrix(self.n_qubits, np.outer(self.amplitudes, self.amplitudes.conj()))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


@dataclass
class DensityMatrix:
    """Mixed state of ``n_qubits`` qubits as a 2^n x 2^n complex matrix."""

    n_qubits: int
    matrix: np.ndarray

    def __post_init__(self):
        if self.n_qubits < 1 or self.n_qubits > MAX_DENSITY_QUBITS:
            raise ValueError(
                f"n_qubits={self.n_qubits} outside supported range "
                f"[1, {MAX_DENSITY_QUBITS}]"
            )
        self.matrix = np.ascontiguousarray(self.matrix, dtype=np.complex128)
        dim = 2**self.n_qubits
        if self.matrix.shape != (dim, dim):
            raise DimensionError(f"expected shape {(dim, dim)}, got {self.matrix.shape}")

    @classmethod
    def ground(cls, n_qubits: int) -> "DensityMatrix":
        """|0...0><0...0|."""
        dim = 2**n_qubits
        mat = np.zeros((dim, dim), dtype=np.complex128)
        mat[0, 0] = 1.0
        return cls(n_qubits, mat)

    @classmethod
    def maximally_mixed(cls, n_qubits: int) -> "DensityMatrix":
        dim = 2**n_qubits
        return cls(n_qubits, np.eye(dim, dtype=np.complex128) / dim)

    def trace(self) -> complex:
        return complex(np.trace(self.matrix))

    def check_valid(self, atol: float = NORM_ATOL) -> None:
        """Hermitian, unit trace, eigenvalues >= -atol."""
        if abs(self.trace() - 1.0) > atol:
            raise ValueError(f"trace {self.trace()} is not 1 within {atol}")
        asym = np.max(np.abs(self.matrix - self.matrix.conj().T))
        if asym > atol:
            raise NonHermitianError(f"max Hermiticity violation {asym} > {atol}")
        lo = float(np.min(np.linalg.eigvalsh(self.matrix)))
        if lo < -atol:
            raise ValueError(f"negative eigenvalue {lo} below -{atol}")

    def purity(self) -> float:
        return float(np.real(np.vdot(self.matrix, self.matrix)))

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.n_qubits, self.matrix.copy())


@dataclass
class GateMatrix:
    """A 1- or 2-qubit gate as a dense unitary."""

    arity: int
    matrix: np.ndarray
    unitary: bool = field(default=True)

    def __post_init__(self):
        if self.arity not in (1, 2):
            raise ValueError(f"arity must be 1 or 2, got {self.arity}")
        self.matrix = np.asarray(self.matrix, dtype=np.complex128)
        dim = 2**self.arity
        if self.matrix.shape != (dim, dim):
            raise DimensionError(f"expected shape {(dim, dim)}, got {self.matrix.shape}")
        if self.unitary:
            err = np.max(np.abs(self.matrix.conj().T @ self.matrix - np.eye(dim)))
            if err > NORM_ATOL * 100:
                raise NonUnitaryError(f"U^dag U deviates from identity by {err}")


# ---------------------------------------------------------------------------
# gate library
# ---------------------------------------------------------------------------

_SQ2 = 1.0 / math.sqrt(2.0)

PAULI_I = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


def x_gate() -> GateMatrix:
    return GateMatrix(1, PAULI_X)


def y_gate() -> GateMatrix:
    return GateMatrix(1, PAULI_Y)


def z_gate() -> GateMatrix:
    return GateMatrix(1, PAULI_Z)


def hadamard() -> GateMatrix:
    return GateMatrix(1, _SQ2 * np.array([[1, 1], [1, -1]], dtype=np.complex128))


def phase_s() -> GateMatrix:
    return GateMatrix(1, np.diag([1.0, 1j]).astype(np.complex128))


def t_gate() -> GateMatrix:
    return GateMatrix(1, np.diag([1.0, np.exp(1j * np.pi / 4)]))


def rotation_y(theta: float) -> GateMatrix:
    """exp(-i Y theta / 2)."""
    c, s = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return GateMatrix(1, np.array([[c, -s], [s, c]], dtype=np.complex128))


def cnot(control_first: bool = True) -> GateMatrix:
    """CX in the two-qubit basis |q0 q1>; control on q0 by default."""
    mat = np.eye(4, dtype=np.complex128)
    if control_first:
        mat[[2, 3]] = mat[[3, 2]]
    else:
        mat[[1, 3]] = mat[[3, 1]]
    return GateMatrix(2, mat)


def swap_gate() -> GateMatrix:
    mat = np.eye(4, dtype=np.complex128)
    mat[[1, 2]] = mat[[2, 1]]
    return GateMatrix(2, mat)


def conditional_t() -> GateMatrix:
    """Diagonal two-qubit gate applying the T phase e^{i pi/4} on |11> only."""
    return GateMatrix(2, np.diag([1.0, 1.0, 1.0, np.exp(1j * np.pi / 4)]))


# ---------------------------------------------------------------------------
# gate application
# ---------------------------------------------------------------------------

def apply_matrix_to_axes(tensor: np.ndarray, mat: np.ndarray, axes) -> np.ndarray:
    """Contract ``mat`` (2^k x 2^k) into ``k`` binary axes of ``tensor``.

    The listed axes are interpreted jointly as one 2^k index, most
    significant first.  Remaining axes are untouched, so the same kernel
    serves statevectors, density-matrix row/column sides and stacked
    column blocks.
    """
    k = len(axes)
    moved = np.moveaxis(tensor, axes, range(k))
    tail = moved.shape[k:]
    out = mat @ moved.reshape(1 << k, -1)
    out = out.reshape((2,) * k + tail)
    return np.moveaxis(out, range(k), axes)


def _check_targets(n_qubits: int, gate: GateMatrix, targets) -> tuple:
    targets = tuple(int(t) for t in targets)
    if len(targets) != gate.arity:
        raise DimensionError(
            f"gate arity {gate.arity} does not match {len(targets)} targets"
        )
    if len(set(targets)) != len(targets):
        raise ValueError(f"targets must be distinct, got {targets}")
    for t in targets:
        if not 0 <= t < n_qubits:
            raise ValueError(f"target {t} out of range for {n_qubits} qubits")
    return targets


def apply_gate(state, gate: GateMatrix, targets) -> None:
    """Apply ``gate`` to the target qubits of ``state`` in place.

    For a :class:`StateVector` this realizes ``U |psi>``; for a
    :class:`DensityMatrix`, ``U rho U^dag``.  Norm (resp. trace and
    Hermiticity) is preserved by unitarity.
    """
    targets = _check_targets(state.n_qubits, gate, targets)
    n = state.n_qubits
    if isinstance(state, StateVector):
        t = state.amplitudes.reshape((2,) * n)
        t = apply_matrix_to_axes(t, gate.matrix, list(targets))
        state.amplitudes = np.ascontiguousarray(t.reshape(-1))
    elif isinstance(state, DensityMatrix):
        t = state.matrix.reshape((2,) * (2 * n))
        t = apply_matrix_to_axes(t, gate.matrix, list(targets))
        t = apply_matrix_to_axes(t, gate.matrix.conj(), [n + q for q in targets])
        state.matrix = np.ascontiguousarray(t.reshape(2**n, 2**n))
    else:
        raise TypeError(f"unsupported state type {type(state).__name__}")


# ---------------------------------------------------------------------------
# partial trace, spectra, distances
# ---------------------------------------------------------------------------

def partial_trace(state, keep) -> DensityMatrix:
    """Reduced density matrix on the ``keep`` qubits (ascending order).

    Accepts a pure or mixed global state.  ``keep`` must be a nonempty
    proper subset of the qubits.
    """
    keep = sorted(set(int(q) for q in keep))
    n = state.n_qubits
    if not keep:
        raise ValueError("keep set is empty")
    if len(keep) == n:
        raise ValueError("keep set must be a proper subset")
    if keep[0] < 0 or keep[-1] >= n:
        raise ValueError(f"keep qubits {keep} out of range for {n} qubits")
    traced = [q for q in range(n) if q not in keep]
    k = len(keep)

    if isinstance(state, StateVector):
        # Gram route: rho_keep = A A^dag with A the (2^k, 2^{n-k}) reshape.
        t = state.amplitudes.reshape((2,) * n)
        t = np.transpose(t, keep + traced).reshape(1 << k, -1)
        return DensityMatrix(k, t @ t.conj().T)
    if isinstance(state, DensityMatrix):
        t = state.matrix.reshape((2,) * (2 * n))
        perm = keep + traced + [n + q for q in keep] + [n + q for q in traced]
        t = np.transpose(t, perm).reshape(1 << k, 1 << (n - k), 1 << k, 1 << (n - k))
        return DensityMatrix(k, np.einsum("arbr->ab", t))
    raise TypeError(f"unsupported state type {type(state).__name__}")


def eigh_hermitian(matrix: np.ndarray, atol: float = HERMITICITY_ATOL):
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending.

    Checks the maximum elementwise asymmetry before delegating to the
    LAPACK Hermitian solver.
    """
    matrix = np.asarray(matrix)
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
        raise DimensionError(f"expected a square matrix, got shape {matrix.shape}")
    asym = float(np.max(np.abs(matrix - matrix.conj().T))) if matrix.size else 0.0
    if asym > atol:
        raise NonHermitianError(f"max asymmetry {asym} exceeds {atol}")
    vals, vecs = np.linalg.eigh(matrix)
    return vals, vecs


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    """(1/2) sum of absolute eigenvalues of a - b."""
    if a.n_qubits != b.n_qubits:
        raise DimensionError(
            f"dimension mismatch: {a.n_qubits} vs {b.n_qubits} qubits"
        )
    diff = a.matrix - b.matrix
    vals = np.linalg.eigvalsh(0.5 * (diff + diff.conj().T))
    return float(0.5 * np.sum(np.abs(vals)))
