"""Tests for the dense state engine: conventions, kernels, reductions."""

import numpy as np
import pytest

from pqrc.states import (
    DensityMatrix,
    DimensionError,
    NonHermitianError,
    NonUnitaryError,
    StateVector,
    apply_gate,
    apply_matrix_to_axes,
    cnot,
    conditional_t,
    eigh_hermitian,
    hadamard,
    partial_trace,
    phase_s,
    rotation_y,
    swap_gate,
    t_gate,
    trace_distance,
    x_gate,
    z_gate,
)

RNG = np.random.default_rng(1234)


def random_unitary(dim, rng=RNG):
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


# ---------------------------------------------------------------------------
# conventions
# ---------------------------------------------------------------------------

def test_qubit_zero_is_most_significant_bit():
    psi = StateVector.zero(3)
    apply_gate(psi, x_gate(), (0,))
    # flipping qubit 0 moves |000> to |100> = basis index 4
    assert np.argmax(np.abs(psi.amplitudes)) == 4

    psi = StateVector.zero(3)
    apply_gate(psi, x_gate(), (2,))
    assert np.argmax(np.abs(psi.amplitudes)) == 1


def test_basis_state_roundtrip():
    psi = StateVector.basis(4, 9)
    assert psi.amplitudes[9] == 1.0
    assert psi.norm() == pytest.approx(1.0)


def test_two_qubit_target_order_matters():
    # CNOT with control on qubit 1, target on qubit 0
    psi = StateVector.zero(2)
    apply_gate(psi, x_gate(), (1,))          # |01>
    apply_gate(psi, cnot(), (1, 0))          # control=1 fires -> |11>
    assert np.argmax(np.abs(psi.amplitudes)) == 3


# ---------------------------------------------------------------------------
# gate library
# ---------------------------------------------------------------------------

def test_gate_identities():
    h = hadamard().matrix
    s = phase_s().matrix
    t = t_gate().matrix
    assert np.allclose(h @ h, np.eye(2), atol=1e-12)
    assert np.allclose(t @ t, s, atol=1e-12)
    assert np.allclose(np.linalg.matrix_power(s, 4), np.eye(2), atol=1e-12)


def test_conditional_t_matrix():
    ct = conditional_t().matrix
    expected = np.diag([1.0, 1.0, 1.0, np.exp(1j * np.pi / 4)])
    assert np.allclose(ct, expected, atol=1e-15)


def test_rotation_y_of_ground_state():
    theta = 0.731
    psi = StateVector.zero(1)
    apply_gate(psi, rotation_y(theta), (0,))
    assert psi.amplitudes[0] == pytest.approx(np.cos(theta / 2))
    assert psi.amplitudes[1] == pytest.approx(np.sin(theta / 2))


def test_non_unitary_matrix_rejected():
    with pytest.raises(NonUnitaryError):
        from pqrc.states import GateMatrix

        GateMatrix(1, np.array([[1.0, 0.0], [0.0, 2.0]]))


def test_dimension_mismatch_rejected():
    with pytest.raises(DimensionError):
        StateVector(2, np.ones(3))


# ---------------------------------------------------------------------------
# tensor kernel against a dense-operator oracle
# ---------------------------------------------------------------------------

def test_apply_matrix_to_axes_matches_kron_oracle():
    n = 3
    psi = StateVector.haar_random(n, RNG)
    u = random_unitary(4)
    # oracle: build the full 8x8 operator acting on qubits (0, 2)
    full = np.zeros((8, 8), dtype=complex)
    for b_in in range(8):
        bits = [(b_in >> (n - 1 - q)) & 1 for q in range(n)]
        col = np.zeros(8, dtype=complex)
        for r0 in range(2):
            for r2 in range(2):
                amp = u[2 * r0 + r2, 2 * bits[0] + bits[2]]
                b_out = (r0 << 2) | (bits[1] << 1) | r2
                col[b_out] += amp
        full[:, b_in] = col
    expected = full @ psi.amplitudes

    tensor = psi.amplitudes.reshape((2,) * n)
    got = apply_matrix_to_axes(tensor, u, (0, 2)).reshape(-1)
    assert np.max(np.abs(got - expected)) < 1e-12


def test_apply_gate_preserves_norm():
    from pqrc.states import GateMatrix

    psi = StateVector.haar_random(4, RNG)
    for _ in range(20):
        apply_gate(psi, GateMatrix(2, random_unitary(4)), (1, 3))
    psi.check_normalized()


def test_apply_gate_on_density_matrix_matches_statevector():
    psi = StateVector.haar_random(3, RNG)
    rho = psi.to_density_matrix()
    u = random_unitary(4)
    from pqrc.states import GateMatrix

    gate = GateMatrix(2, u)
    apply_gate(psi, gate, (0, 1))
    apply_gate(rho, gate, (0, 1))
    assert np.max(np.abs(rho.matrix - psi.to_density_matrix().matrix)) < 1e-12


# ---------------------------------------------------------------------------
# partial trace and distances
# ---------------------------------------------------------------------------

def ghz(n):
    amps = np.zeros(2**n, dtype=complex)
    amps[0] = amps[-1] = 1 / np.sqrt(2)
    return StateVector(n, amps)


def test_partial_trace_of_ghz_is_maximally_mixed():
    rho = partial_trace(ghz(4), (0,))
    assert np.allclose(rho.matrix, np.eye(2) / 2, atol=1e-12)


def test_partial_trace_of_product_state_is_pure():
    psi = StateVector.random_product(4, RNG)
    rho = partial_trace(psi, (1, 2))
    assert rho.purity() == pytest.approx(1.0, abs=1e-12)


def test_partial_trace_keeps_trace_one():
    psi = StateVector.haar_random(5, RNG)
    rho = partial_trace(psi, (0, 3, 4))
    assert rho.trace() == pytest.approx(1.0, abs=1e-12)
    rho.check_valid()


def test_partial_trace_density_route_matches_pure_route():
    psi = StateVector.haar_random(4, RNG)
    a = partial_trace(psi, (1, 2)).matrix
    b = partial_trace(psi.to_density_matrix(), (1, 2)).matrix
    assert np.max(np.abs(a - b)) < 1e-12


def test_partial_trace_sorts_keep_ascending():
    # |q0 q1 q2> = |0>|+>|1>: keep (2, 0) is documented to reduce onto
    # the sorted pair (0, 2), so the result is |q0 q2> = |01>
    psi = StateVector.zero(3)
    apply_gate(psi, hadamard(), (1,))
    apply_gate(psi, x_gate(), (2,))
    rho = partial_trace(psi, (2, 0))
    expected = np.zeros((4, 4))
    expected[1, 1] = 1.0
    assert np.allclose(rho.matrix, expected, atol=1e-12)


def test_trace_distance_orthogonal_states():
    a = StateVector.basis(2, 0).to_density_matrix()
    b = StateVector.basis(2, 3).to_density_matrix()
    assert trace_distance(a, b) == pytest.approx(1.0)


def test_trace_distance_ground_vs_plus():
    plus = StateVector.zero(1)
    apply_gate(plus, hadamard(), (0,))
    d = trace_distance(StateVector.zero(1).to_density_matrix(),
                       plus.to_density_matrix())
    # pure-state distance sqrt(1 - |<a|b>|^2) = 1/sqrt(2)
    assert d == pytest.approx(1 / np.sqrt(2), abs=1e-12)


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NonHermitianError):
        eigh_hermitian(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_density_matrix_validation():
    dm = DensityMatrix.maximally_mixed(2)
    dm.check_valid()
    bad = DensityMatrix(1, np.array([[0.5, 0.0], [0.0, 0.25]]))
    with pytest.raises(ValueError):
        bad.check_valid()


def test_swap_gate_action():
    psi = StateVector.zero(2)
    apply_gate(psi, x_gate(), (0,))       # |10>
    apply_gate(psi, swap_gate(), (0, 1))  # |01>
    assert np.argmax(np.abs(psi.amplitudes)) == 1


def test_z_eigenvalues():
    z = z_gate().matrix
    assert np.allclose(z, np.diag([1.0, -1.0]))
