"""Nonstabilizerness diagnostics.

Magic is measured by the second stabilizer Renyi entropy

    M(rho) = -log2( 2^{-N} sum_P Tr(rho P)^4 ) - S2(rho),

with S2 = -log2 Tr rho^2 and the sum over all 4^N Pauli strings.  The
two 2^{-N} factors cancel, so M = -log2( sum c^4 / sum c^2 ) over the
Pauli coefficient vector c_P = Tr(rho P).  Mutual magic subtracts the
two half-system contributions from the whole; anti-flatness
F = Tr rho_R^3 - (Tr rho_R^2)^2 is the variance of a reduced state with
respect to itself and vanishes exactly on stabilizer and product states.

Pauli coefficients are computed by a per-qubit butterfly: grouping the
row and column bit of qubit j into one base-4 axis, a fixed 4x4 matrix
maps (rho_00, rho_01, rho_10, rho_11) to (c_I, c_X, c_Y, c_Z) on that
axis.  n passes give all 4^n coefficients in O(n 4^n) arithmetic.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict
from pathlib import Path

import numpy as np

from .rng import child_seed, make_rng
from .states import DensityMatrix, StateVector, eigh_hermitian, partial_trace
from .spectra import fit_linear

PAULI_CAP_QUBITS = 12
PAULI_IMAG_ATOL = 1e-8
MIN_HAAR_SAMPLES = 50

# Maps the flattened (row bit, col bit) pair of one qubit, ordered as
# index 2r + c, to the coefficients of (I, X, Y, Z) on that qubit.
_BUTTERFLY = np.array(
    [
        [1, 0, 0, 1],
        [0, 1, 1, 0],
        [0, 1j, -1j, 0],
        [1, 0, 0, -1],
    ],
    dtype=complex,
)


class PauliCapError(ValueError):
    """System size beyond the configured 4^n transform cap."""


@dataclass(frozen=True)
class PauliSpectrum:
    """All 4^n Pauli coefficients c_P = Tr(rho P).

    Index is base 4 with qubit 0 as the most significant digit and
    digit values 0=I, 1=X, 2=Y, 3=Z.
    """

    n_qubits: int
    coefficients: np.ndarray

    def purity(self) -> float:
        return float(np.sum(self.coefficients**2) / 2**self.n_qubits)


def pauli_transform(rho: DensityMatrix, cap: int = PAULI_CAP_QUBITS) -> PauliSpectrum:
    """Pauli coefficient vector of a density matrix.

    Raises PauliCapError above the cap (default 12 qubits, a 4^12
    coefficient array); raises on coefficients with imaginary parts
    beyond 1e-8, which would indicate a non-Hermitian input.
    """
    n = rho.n_qubits
    if n > cap:
        raise PauliCapError(f"{n} qubits exceeds Pauli transform cap {cap}")
    t = rho.matrix.reshape((2,) * (2 * n))
    # interleave row/column axes per qubit, then merge each pair into a
    # base-4 axis ordered 2r + c
    perm = [ax for j in range(n) for ax in (j, n + j)]
    t = np.transpose(t, perm).reshape((4,) * n)
    for axis in range(n):
        moved = np.moveaxis(t, axis, 0)
        shape = moved.shape
        out = _BUTTERFLY @ moved.reshape(4, -1)
        t = np.moveaxis(out.reshape(shape), 0, axis)
    coeffs = t.reshape(-1)
    worst = np.abs(coeffs.imag).max()
    if worst > PAULI_IMAG_ATOL:
        raise ValueError(f"Pauli coefficients not real (max imag {worst:.3e})")
    return PauliSpectrum(n_qubits=n, coefficients=np.ascontiguousarray(coeffs.real))


def sre2_from_spectrum(spectrum: PauliSpectrum) -> float:
    """Second stabilizer Renyi entropy from a Pauli coefficient vector."""
    c2 = spectrum.coefficients**2
    sum2 = float(np.sum(c2))
    sum4 = float(np.sum(c2**2))
    if sum2 / 2**spectrum.n_qubits < 1e-14:
        raise ValueError("numerically zero purity")
    return float(-np.log2(sum4 / sum2))


def sre2(rho: DensityMatrix, cap: int = PAULI_CAP_QUBITS) -> float:
    """Second stabilizer Renyi entropy, valid for mixed states.

    Zero (within 1e-8) on stabilizer states, additive on tensor
    products, invariant under Clifford conjugation.
    """
    return sre2_from_spectrum(pauli_transform(rho, cap=cap))


def anti_flatness_from_eigenvalues(vals: np.ndarray) -> float:
    """F = sum lambda^3 - (sum lambda^2)^2 from reduced eigenvalues."""
    vals = np.clip(np.asarray(vals, dtype=float), 0.0, None)
    return float(np.sum(vals**3) - np.sum(vals**2) ** 2)


def _bipartition(n_qubits: int, cut: int | None):
    if cut is None:
        if n_qubits % 2:
            raise ValueError("odd qubit count requires an explicit cut")
        cut = n_qubits // 2
    if not (0 < cut < n_qubits):
        raise ValueError(f"cut {cut} outside (0, {n_qubits})")
    return tuple(range(cut)), tuple(range(cut, n_qubits))


def anti_flatness(psi: StateVector, cut: int | None = None) -> float:
    """Anti-flatness of a pure state across the cut (default half).

    Computed from reduced eigenvalues on the smaller side of the cut;
    both sides share the nonzero spectrum for pure global states.
    """
    part_m, part_r = _bipartition(psi.n_qubits, cut)
    keep = part_m if len(part_m) <= len(part_r) else part_r
    vals, _ = eigh_hermitian(partial_trace(psi, keep).matrix)
    return anti_flatness_from_eigenvalues(vals)


@dataclass(frozen=True)
class MagicReport:
    """SRE-2 decomposition across a bipartition plus anti-flatness.

    relative_gap is NaN until a Haar reference is supplied.
    """

    total_magic: float
    magic_m: float
    magic_r: float
    mutual_magic: float
    anti_flatness: float
    relative_gap: float = float("nan")


def mutual_magic(psi: StateVector, cut: int | None = None) -> MagicReport:
    """Mutual magic I = M(rho) - M(rho_M) - M(rho_R) of a pure state.

    The subsystem terms use the mixed-state formula including their -S2
    corrections.  I vanishes on stabilizer states and on product states
    with only local magic.
    """
    part_m, part_r = _bipartition(psi.n_qubits, cut)
    total = sre2(psi.to_density_matrix())
    rho_m = partial_trace(psi, part_m)
    rho_r = partial_trace(psi, part_r)
    magic_m = sre2(rho_m)
    magic_r = sre2(rho_r)
    vals, _ = eigh_hermitian(rho_r.matrix if len(part_r) <= len(part_m) else rho_m.matrix)
    return MagicReport(
        total_magic=total,
        magic_m=magic_m,
        magic_r=magic_r,
        mutual_magic=total - magic_m - magic_r,
        anti_flatness=anti_flatness_from_eigenvalues(vals),
    )


def relative_gap(mutual: float, haar_reference_value: float) -> float:
    """|I - I_H| / I_H against a Haar ensemble mean at the same size.

    Values above 1 are possible with sampled finite-size references and
    are reported raw; callers flag rather than clip them.
    """
    if haar_reference_value <= 0:
        raise ValueError("Haar reference must be positive")
    return abs(mutual - haar_reference_value) / haar_reference_value


@dataclass(frozen=True)
class HaarReference:
    """Ensemble means of magic diagnostics over Haar-random pure states."""

    n_qubits: int
    samples: int
    seed: int
    mean_mutual: float
    se_mutual: float
    mean_magic: float
    se_magic: float
    mean_anti_flatness: float
    se_anti_flatness: float


def _haar_cache_key(n_qubits: int, samples: int, seed: int) -> str:
    return f"n{n_qubits}_s{samples}_seed{seed}"


def haar_reference(
    n_qubits: int,
    samples: int,
    seed: int,
    cache_path: str | Path | None = None,
) -> HaarReference:
    """Sampled Haar means of (I, M, F) at fixed size, with standard errors.

    Haar states are normalized complex Gaussian amplitude vectors.  When
    cache_path is given, results are stored in a JSON table keyed by
    (n_qubits, samples, seed) and reused on later calls.
    """
    if samples < MIN_HAAR_SAMPLES:
        raise ValueError(f"need at least {MIN_HAAR_SAMPLES} samples")
    key = _haar_cache_key(n_qubits, samples, seed)
    cache = {}
    if cache_path is not None:
        cache_path = Path(cache_path)
        if cache_path.exists():
            cache = json.loads(cache_path.read_text())
            if key in cache:
                return HaarReference(**cache[key])
    rng = make_rng(child_seed(seed, n_qubits, samples))
    mutual_vals = np.empty(samples)
    magic_vals = np.empty(samples)
    flat_vals = np.empty(samples)
    for k in range(samples):
        psi = StateVector.haar_random(n_qubits, rng)
        report = mutual_magic(psi, cut=n_qubits // 2)
        mutual_vals[k] = report.mutual_magic
        magic_vals[k] = report.total_magic
        flat_vals[k] = report.anti_flatness
    def _se(a):
        return float(np.std(a, ddof=1) / np.sqrt(samples))
    ref = HaarReference(
        n_qubits=n_qubits,
        samples=samples,
        seed=seed,
        mean_mutual=float(np.mean(mutual_vals)),
        se_mutual=_se(mutual_vals),
        mean_magic=float(np.mean(magic_vals)),
        se_magic=_se(magic_vals),
        mean_anti_flatness=float(np.mean(flat_vals)),
        se_anti_flatness=_se(flat_vals),
    )
    if cache_path is not None:
        cache[key] = asdict(ref)
        cache_path.parent.mkdir(parents=True, exist_ok=True)
        cache_path.write_text(json.dumps(cache, indent=1, sort_keys=True))
    return ref


def haar_anti_flatness(n_qubits: int, samples: int, rng: np.random.Generator):
    """Anti-flatness samples over Haar states; cheaper than full reports."""
    out = np.empty(samples)
    for k in range(samples):
        psi = StateVector.haar_random(n_qubits, rng)
        out[k] = anti_flatness(psi, cut=n_qubits // 2)
    return out


@dataclass(frozen=True)
class ScalingFit:
    """Fit of log2 F = -alpha N + intercept."""

    alpha: float
    intercept: float
    r_squared: float


def scrambling_exponent(n_values, f_means) -> ScalingFit | None:
    """Size-scaling exponent alpha of mean anti-flatness.

    Returns None when any mean is nonpositive (the stabilizer limit,
    where the exponent is undefined).
    """
    n_values = np.asarray(n_values, dtype=float)
    f_means = np.asarray(f_means, dtype=float)
    if n_values.size < 3:
        raise ValueError("need at least 3 system sizes")
    if np.any(f_means <= 0):
        return None
    slope, intercept, r_squared = fit_linear(n_values, np.log2(f_means))
    return ScalingFit(alpha=-slope, intercept=intercept, r_squared=r_squared)
