"""Tests for stabilizer Renyi entropy, mutual magic and anti-flatness."""

import json

import numpy as np
import pytest

from pqrc.circuits import CircuitTemplate, apply_template, build_clifford_table
from pqrc.magic import (
    PauliCapError,
    PauliSpectrum,
    anti_flatness,
    anti_flatness_from_eigenvalues,
    haar_anti_flatness,
    haar_reference,
    mutual_magic,
    pauli_transform,
    relative_gap,
    scrambling_exponent,
    sre2,
    sre2_from_spectrum,
)
from pqrc.states import (
    DensityMatrix,
    StateVector,
    apply_gate,
    cnot,
    hadamard,
    partial_trace,
    t_gate,
)

SINGLE_PAULIS = [
    np.eye(2, dtype=np.complex128),
    np.array([[0, 1], [1, 0]], dtype=np.complex128),
    np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    np.diag([1.0, -1.0]).astype(np.complex128),
]


def _naive_pauli_coefficients(rho: DensityMatrix) -> np.ndarray:
    """Direct Tr(rho P) over all 4^n kron-built strings, oracle route."""
    n = rho.n_qubits
    coeffs = np.empty(4**n)
    for idx in range(4**n):
        digits = [(idx >> (2 * (n - 1 - q))) & 3 for q in range(n)]
        string = np.array([[1.0]], dtype=np.complex128)
        for d in digits:
            string = np.kron(string, SINGLE_PAULIS[d])
        coeffs[idx] = np.trace(rho.matrix @ string).real
    return coeffs


def _t_plus_state(n: int = 1) -> StateVector:
    """(T H |0>)^{tensor n}, the canonical single-qubit magic state."""
    psi = StateVector.zero(n)
    for q in range(n):
        apply_gate(psi, hadamard(), (q,))
        apply_gate(psi, t_gate(), (q,))
    return psi


def _ghz(n):
    psi = StateVector.zero(n)
    apply_gate(psi, hadamard(), (0,))
    for q in range(n - 1):
        apply_gate(psi, cnot(), (q, q + 1))
    return psi


# ---------------------------------------------------------------------------
# Pauli transform
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("n", [2, 3])
def test_pauli_transform_matches_naive_pure(n):
    rng = np.random.default_rng(10 + n)
    rho = StateVector.haar_random(n, rng).to_density_matrix()
    fast = pauli_transform(rho).coefficients
    assert np.allclose(fast, _naive_pauli_coefficients(rho), atol=1e-12)


def test_pauli_transform_matches_naive_mixed():
    rng = np.random.default_rng(20)
    a = StateVector.haar_random(3, rng)
    b = StateVector.haar_random(3, rng)
    mix = 0.3 * a.to_density_matrix().matrix + 0.7 * b.to_density_matrix().matrix
    rho = DensityMatrix(3, mix)
    fast = pauli_transform(rho).coefficients
    assert np.allclose(fast, _naive_pauli_coefficients(rho), atol=1e-12)


def test_pauli_transform_cap():
    rho = DensityMatrix.maximally_mixed(4)
    with pytest.raises(PauliCapError):
        pauli_transform(rho, cap=3)


def test_pauli_spectrum_purity():
    rng = np.random.default_rng(4)
    rho = StateVector.haar_random(3, rng).to_density_matrix()
    assert pauli_transform(rho).purity() == pytest.approx(1.0, abs=1e-10)
    assert pauli_transform(DensityMatrix.maximally_mixed(2)).purity() == (
        pytest.approx(0.25, abs=1e-12)
    )


# ---------------------------------------------------------------------------
# SRE-2
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("make", [
    lambda: StateVector.zero(3),
    lambda: _ghz(4),
])
def test_sre2_zero_on_stabilizer_states(make):
    psi = make()
    assert sre2(psi.to_density_matrix()) == pytest.approx(0.0, abs=1e-8)


def test_sre2_of_t_plus_state():
    # Bloch vector (1/sqrt2, 1/sqrt2, 0): sum c^2 = 2, sum c^4 = 3/2
    value = sre2(_t_plus_state(1).to_density_matrix())
    assert value == pytest.approx(np.log2(4.0 / 3.0), abs=1e-10)


def test_sre2_additive_on_products():
    rng = np.random.default_rng(31)
    a = StateVector.haar_random(2, rng)
    b = StateVector.haar_random(3, rng)
    joint = StateVector(5, np.kron(a.amplitudes, b.amplitudes))
    total = sre2(joint.to_density_matrix())
    parts = sre2(a.to_density_matrix()) + sre2(b.to_density_matrix())
    assert total == pytest.approx(parts, abs=1e-9)


def test_sre2_invariant_under_clifford_circuit():
    rng = np.random.default_rng(32)
    psi = StateVector.random_product(4, rng)
    before = sre2(psi.to_density_matrix())
    template = CircuitTemplate.from_seed(4, 3, 0.0, seed=5)
    apply_template(psi, template, build_clifford_table())
    after = sre2(psi.to_density_matrix())
    assert after == pytest.approx(before, abs=1e-8)


def test_sre2_grows_under_ct_doping():
    table = build_clifford_table()
    psi = StateVector.zero(6)
    apply_template(psi, CircuitTemplate.from_seed(6, 6, 0.3, seed=9), table)
    assert sre2(psi.to_density_matrix()) > 0.5


def test_sre2_from_spectrum_rejects_zero_purity():
    empty = PauliSpectrum(2, np.zeros(16))
    with pytest.raises(ValueError):
        sre2_from_spectrum(empty)


# ---------------------------------------------------------------------------
# anti-flatness
# ---------------------------------------------------------------------------

def test_anti_flatness_zero_on_product_states():
    rng = np.random.default_rng(40)
    psi = StateVector.random_product(4, rng)
    assert anti_flatness(psi) == pytest.approx(0.0, abs=1e-12)


def test_anti_flatness_zero_on_flat_spectra():
    # GHZ reduced spectrum (1/2, 1/2): sum l^3 = 1/4 = (sum l^2)^2
    assert anti_flatness(_ghz(4)) == pytest.approx(0.0, abs=1e-12)


def test_anti_flatness_matches_trace_power_route():
    rng = np.random.default_rng(41)
    psi = StateVector.haar_random(6, rng)
    rho = partial_trace(psi, keep=(0, 1, 2)).matrix
    tr2 = np.trace(rho @ rho).real
    tr3 = np.trace(rho @ rho @ rho).real
    assert anti_flatness(psi) == pytest.approx(tr3 - tr2**2, abs=1e-12)


def test_anti_flatness_cut_validation():
    rng = np.random.default_rng(42)
    psi = StateVector.haar_random(3, rng)
    with pytest.raises(ValueError):
        anti_flatness(psi)  # odd size needs an explicit cut
    with pytest.raises(ValueError):
        anti_flatness(psi, cut=3)
    assert np.isfinite(anti_flatness(psi, cut=1))


def test_anti_flatness_from_eigenvalues_clips_noise():
    vals = np.array([1.0 + 1e-12, -1e-12])
    assert anti_flatness_from_eigenvalues(vals) == pytest.approx(0.0, abs=1e-9)


def test_haar_reduced_purity_matches_page_value():
    # E[Tr rho_A^2] = (d_A + d_B) / (d_A d_B + 1) = 4/5 for one of two qubits
    rng = np.random.default_rng(43)
    purities = [
        partial_trace(StateVector.haar_random(2, rng), keep=(0,)).purity()
        for _ in range(2000)
    ]
    assert np.mean(purities) == pytest.approx(0.8, abs=0.02)


# ---------------------------------------------------------------------------
# mutual magic
# ---------------------------------------------------------------------------

def test_mutual_magic_zero_on_stabilizer_state():
    report = mutual_magic(_ghz(4))
    assert report.total_magic == pytest.approx(0.0, abs=1e-8)
    assert report.mutual_magic == pytest.approx(0.0, abs=1e-8)


def test_mutual_magic_zero_for_local_magic_only():
    # product of single-qubit magic states: all magic is local
    report = mutual_magic(_t_plus_state(4))
    assert report.mutual_magic == pytest.approx(0.0, abs=1e-8)
    assert report.magic_m == pytest.approx(2 * np.log2(4.0 / 3.0), abs=1e-8)
    assert report.anti_flatness == pytest.approx(0.0, abs=1e-10)


def test_mutual_magic_report_is_consistent():
    rng = np.random.default_rng(50)
    report = mutual_magic(StateVector.haar_random(6, rng))
    assert report.mutual_magic == pytest.approx(
        report.total_magic - report.magic_m - report.magic_r, abs=1e-12
    )
    assert np.isnan(report.relative_gap)


def test_relative_gap():
    assert relative_gap(3.0, 2.0) == pytest.approx(0.5)
    assert relative_gap(2.0, 2.0) == pytest.approx(0.0)
    with pytest.raises(ValueError):
        relative_gap(1.0, 0.0)
    with pytest.raises(ValueError):
        relative_gap(1.0, -2.0)


# ---------------------------------------------------------------------------
# Haar references
# ---------------------------------------------------------------------------

def test_haar_reference_rejects_tiny_sample_counts():
    with pytest.raises(ValueError):
        haar_reference(4, samples=10, seed=1)


def test_haar_reference_cache_roundtrip(tmp_path):
    cache = tmp_path / "haar.json"
    first = haar_reference(4, samples=50, seed=3, cache_path=cache)
    assert cache.exists()
    stored = json.loads(cache.read_text())
    assert "n4_s50_seed3" in stored
    again = haar_reference(4, samples=50, seed=3, cache_path=cache)
    assert again == first


def test_haar_magic_tracks_asymptote():
    # Haar mean of M approaches log2(2^N + 3) - 2; at N=8 that is 6.017
    ref = haar_reference(8, samples=50, seed=7)
    expected = np.log2(2.0**8 + 3.0) - 2.0
    assert ref.mean_magic == pytest.approx(expected, abs=0.2)
    assert ref.se_magic < 0.05
    assert ref.mean_mutual > 0
    assert ref.mean_anti_flatness > 0


def test_haar_anti_flatness_sampler():
    rng = np.random.default_rng(8)
    samples = haar_anti_flatness(4, 100, rng)
    assert samples.shape == (100,)
    assert np.all(samples > 0)


# ---------------------------------------------------------------------------
# scaling fit
# ---------------------------------------------------------------------------

def test_scrambling_exponent_exact_recovery():
    n = np.array([4.0, 6.0, 8.0, 10.0])
    f = 2.0 ** (-0.7 * n + 1.3)
    fit = scrambling_exponent(n, f)
    assert fit.alpha == pytest.approx(0.7, abs=1e-12)
    assert fit.intercept == pytest.approx(1.3, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0, abs=1e-12)


def test_scrambling_exponent_null_cases():
    assert scrambling_exponent([4, 6, 8], [1e-3, 0.0, 1e-5]) is None
    assert scrambling_exponent([4, 6, 8], [1e-3, -1e-4, 1e-5]) is None
    with pytest.raises(ValueError):
        scrambling_exponent([4, 6], [1e-3, 1e-4])
