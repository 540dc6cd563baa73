"""Tests for the Clifford table and brickwork circuit templates."""

import numpy as np
import pytest

from pqrc.circuits import (
    CT_CHOICE,
    CircuitTemplate,
    apply_template,
    brickwork_pairs,
    build_clifford_table,
    sample_template,
)
from pqrc.rng import make_rng
from pqrc.states import (
    StateVector,
    apply_gate,
    cnot,
    conditional_t,
    hadamard,
    swap_gate,
)


@pytest.fixture(scope="module")
def table():
    return build_clifford_table()


# ---------------------------------------------------------------------------
# Clifford group closure
# ---------------------------------------------------------------------------

def test_group_order_is_11520(table):
    assert len(table) == 11520


def test_contains_generators_and_known_elements(table):
    assert table.contains(np.eye(4))
    assert table.contains(cnot().matrix)
    assert table.contains(swap_gate().matrix)
    h = hadamard().matrix
    assert table.contains(np.kron(h, h))
    assert table.contains(np.kron(h, np.eye(2)))


def test_conditional_t_is_not_clifford(table):
    assert not table.contains(conditional_t().matrix)
    with pytest.raises(KeyError):
        table.index_of(conditional_t().matrix)


def test_closure_under_products(table):
    rng = make_rng(5)
    for _ in range(25):
        i, j = rng.integers(0, len(table), size=2)
        assert table.contains(table[int(i)] @ table[int(j)])


def test_index_of_ignores_global_phase(table):
    k = 137
    u = table[k]
    assert table.index_of(np.exp(0.37j) * u) == k


def test_elements_are_unitary(table):
    rng = make_rng(6)
    for _ in range(20):
        u = table[int(rng.integers(0, len(table)))]
        assert np.max(np.abs(u.conj().T @ u - np.eye(4))) < 1e-10


def test_conjugation_maps_paulis_to_paulis(table):
    # Clifford defining property, checked in the Pauli coefficient basis:
    # U P U^dag must be another signed Pauli string
    paulis = [np.eye(2), np.array([[0, 1], [1, 0]]),
              np.array([[0, -1j], [1j, 0]]), np.diag([1, -1])]
    strings = [np.kron(a, b) for a in paulis for b in paulis]
    rng = make_rng(7)
    for _ in range(10):
        u = table[int(rng.integers(0, len(table)))]
        p = strings[int(rng.integers(1, 16))]
        image = u @ p @ u.conj().T
        overlaps = np.array([np.trace(q.conj().T @ image) / 4 for q in strings])
        mags = np.sort(np.abs(overlaps))
        # exactly one unit-magnitude coefficient, all others zero
        assert mags[-1] == pytest.approx(1.0, abs=1e-10)
        assert np.max(mags[:-1]) < 1e-10


# ---------------------------------------------------------------------------
# brickwork geometry
# ---------------------------------------------------------------------------

def test_brickwork_pairs_even_and_odd():
    assert brickwork_pairs(6, 0) == [(0, 1), (2, 3), (4, 5)]
    assert brickwork_pairs(6, 1) == [(1, 2), (3, 4)]
    assert brickwork_pairs(5, 0) == [(0, 1), (2, 3)]
    assert brickwork_pairs(5, 1) == [(1, 2), (3, 4)]


@pytest.mark.parametrize("n,depth", [(4, 3), (5, 2), (6, 5), (7, 4)])
def test_gate_count_is_sites_minus_one_per_brick(n, depth):
    template = CircuitTemplate.from_seed(n, depth, 0.3, seed=11)
    assert template.n_slots == (n - 1) * depth
    assert template.n_sublayers == 2 * depth


def test_template_determinism():
    a = CircuitTemplate.from_seed(6, 4, 0.25, seed=99)
    b = CircuitTemplate.from_seed(6, 4, 0.25, seed=99)
    c = CircuitTemplate.from_seed(6, 4, 0.25, seed=100)
    assert np.array_equal(a.choices, b.choices)
    assert np.array_equal(a.layers, b.layers)
    assert np.array_equal(a.pairs, b.pairs)
    assert not np.array_equal(a.choices, c.choices)


def test_ct_probability_endpoints():
    zero = CircuitTemplate.from_seed(8, 4, 0.0, seed=1)
    one = CircuitTemplate.from_seed(8, 4, 1.0, seed=1)
    assert zero.ct_count == 0
    assert one.ct_count == one.n_slots
    assert np.all(one.choices == CT_CHOICE)


def test_ct_count_matches_binomial_mean():
    p = 0.3
    counts = [
        CircuitTemplate.from_seed(8, 6, p, seed=s).ct_count
        for s in range(400)
    ]
    n_slots = 7 * 6
    mean = np.mean(counts) / n_slots
    # 4 sigma band for 400 * 42 Bernoulli draws
    sigma = np.sqrt(p * (1 - p) / (400 * n_slots))
    assert abs(mean - p) < 4 * sigma


def test_invalid_probability_rejected():
    with pytest.raises(ValueError):
        CircuitTemplate.from_seed(4, 2, 1.5, seed=0)
    with pytest.raises(ValueError):
        CircuitTemplate.from_seed(4, 2, -0.1, seed=0)


def test_json_roundtrip():
    template = CircuitTemplate.from_seed(6, 3, 0.4, seed=42)
    clone = CircuitTemplate.from_json(template.to_json())
    assert clone.n_qubits == template.n_qubits
    assert clone.depth == template.depth
    assert clone.ct_probability == template.ct_probability
    assert clone.seed == template.seed
    assert np.array_equal(clone.choices, template.choices)
    assert np.array_equal(clone.layers, template.layers)
    assert np.array_equal(clone.pairs, template.pairs)


def test_sample_template_draws_fresh_seeds():
    rng = make_rng(17)
    a = sample_template(6, 2, 0.3, rng)
    b = sample_template(6, 2, 0.3, rng)
    assert a.seed != b.seed


# ---------------------------------------------------------------------------
# template application
# ---------------------------------------------------------------------------

def test_apply_template_deterministic(table):
    template = CircuitTemplate.from_seed(6, 4, 0.3, seed=7)
    a = StateVector.zero(6)
    b = StateVector.zero(6)
    apply_template(a, template, table)
    apply_template(b, template, table)
    assert np.array_equal(a.amplitudes, b.amplitudes)
    a.check_normalized()


def test_max_sublayer_truncation(table):
    template = CircuitTemplate.from_seed(6, 3, 0.5, seed=8)
    full = StateVector.zero(6)
    apply_template(full, template, table)
    capped = StateVector.zero(6)
    apply_template(capped, template, table, max_sublayer=template.n_sublayers)
    assert np.allclose(full.amplitudes, capped.amplitudes, atol=1e-14)

    untouched = StateVector.zero(6)
    apply_template(untouched, template, table, max_sublayer=0)
    assert np.array_equal(untouched.amplitudes, StateVector.zero(6).amplitudes)


def test_truncation_prefix_composes(table):
    # applying sublayers [0, k) then completing the circuit must equal
    # one full application
    template = CircuitTemplate.from_seed(5, 3, 0.4, seed=3)
    full = StateVector.zero(5)
    apply_template(full, template, table)

    staged = StateVector.zero(5)
    apply_template(staged, template, table, max_sublayer=3)
    ct = conditional_t()
    for slot in range(template.n_slots):
        if template.layers[slot] < 3:
            continue
        choice = template.choices[slot]
        gate = ct if choice == CT_CHOICE else table.gate(int(choice))
        a, b = template.pairs[slot]
        apply_gate(staged, gate, (int(a), int(b)))
    assert np.max(np.abs(staged.amplitudes - full.amplitudes)) < 1e-13


def test_p_zero_template_maps_basis_to_flat_spectrum(table):
    # Clifford circuits keep computational states stabilizer: every
    # amplitude magnitude is 0 or a common constant
    template = CircuitTemplate.from_seed(6, 12, 0.0, seed=21)
    psi = StateVector.zero(6)
    apply_template(psi, template, table)
    mags = np.abs(psi.amplitudes)
    support = mags[mags > 1e-12]
    assert np.allclose(support, support[0], atol=1e-10)
