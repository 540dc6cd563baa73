"""Brickwork circuit realizations.

A circuit template records, for every two-qubit slot of an open-boundary
brickwork layout, either a uniformly sampled two-qubit Clifford (by index
into the enumerated 11520-element group) or the diagonal conditional-T
gate, drawn independently per slot with probability ``p``.  Templates are
pure data: given (n_qubits, depth, p, seed) the realization is fully
determined and can be regenerated from those four numbers alone.

One unit of depth is a full brick: an even sublayer coupling (0,1),
(2,3), ... followed by an odd sublayer coupling (1,2), (3,4), ...  A
brick holds exactly N - 1 gates on N qubits, so the total gate count is
(N - 1) * depth.  Depth-resolved observables may still be sampled at
sublayer granularity via ``max_sublayer``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .rng import make_rng
from .states import (
    GateMatrix,
    apply_gate,
    cnot,
    conditional_t,
    hadamard,
    phase_s,
    rotation_y,
)

TWO_QUBIT_CLIFFORD_ORDER = 11520

CT_CHOICE = -1  # slot marker; non-negative entries index the Clifford table

_CANON_DECIMALS = 8
_CANON_TOL = 1e-8


class CliffordTable:
    """The two-qubit Clifford group modulo global phase, as dense unitaries.

    Built once by breadth-first closure over {H x I, I x H, S x I, I x S,
    CX(0->1), CX(1->0)} under matrix product, with each product canonicalized
    by rotating its first nonzero entry to the positive real axis.
    """

    def __init__(self, unitaries: np.ndarray, index_of: dict):
        self.unitaries = unitaries
        self._index_of = index_of

    def __len__(self) -> int:
        return self.unitaries.shape[0]

    def __getitem__(self, index: int) -> np.ndarray:
        return self.unitaries[index]

    def gate(self, index: int) -> GateMatrix:
        return GateMatrix(2, self.unitaries[index])

    def index_of(self, unitary: np.ndarray) -> int:
        """Index of a 4x4 unitary, compared modulo global phase.

        Raises KeyError when the matrix is not Clifford.
        """
        key = _canonical_key(np.asarray(unitary, dtype=np.complex128))
        if key not in self._index_of:
            raise KeyError("matrix is not a two-qubit Clifford (mod phase)")
        return self._index_of[key]

    def contains(self, unitary: np.ndarray) -> bool:
        try:
            self.index_of(unitary)
            return True
        except KeyError:
            return False


def _canonicalize(mat: np.ndarray) -> np.ndarray:
    """Rotate the first nonzero entry to the positive real axis."""
    flat = mat.reshape(-1)
    nz = np.flatnonzero(np.abs(flat) > _CANON_TOL)
    pivot = flat[nz[0]]
    return mat * (abs(pivot) / pivot)


def _canonical_key(mat: np.ndarray) -> bytes:
    # Rounding happens only here, never in the stored matrices, so errors do
    # not compound along products; re-adding +0.0 maps -0.0 onto +0.0 so the
    # byte-level key is unique.
    return (np.round(_canonicalize(mat), _CANON_DECIMALS) + (0.0 + 0.0j)).tobytes()


@lru_cache(maxsize=1)
def build_clifford_table() -> CliffordTable:
    """Enumerate all 11520 two-qubit Cliffords modulo global phase."""
    h, s, cx = hadamard().matrix, phase_s().matrix, cnot(True).matrix
    eye = np.eye(2, dtype=np.complex128)
    generators = np.stack([
        np.kron(h, eye),
        np.kron(eye, h),
        np.kron(s, eye),
        np.kron(eye, s),
        cx,
        cnot(False).matrix,
    ])

    start = np.eye(4, dtype=np.complex128)
    elements = [start]
    index_of = {_canonical_key(start): 0}
    frontier = [start]
    while frontier:
        products = np.einsum("gij,fjk->fgik", generators, np.stack(frontier))
        frontier = []
        for mat in products.reshape(-1, 4, 4):
            canon = _canonicalize(mat)
            key = _canonical_key(canon)
            if key in index_of:
                continue
            index_of[key] = len(elements)
            elements.append(canon)
            frontier.append(canon)
            if len(elements) > TWO_QUBIT_CLIFFORD_ORDER:
                raise RuntimeError(
                    "Clifford closure exceeded 11520 elements; "
                    "canonicalization is broken"
                )
    if len(elements) != TWO_QUBIT_CLIFFORD_ORDER:
        raise RuntimeError(
            f"Clifford closure produced {len(elements)} elements, expected "
            f"{TWO_QUBIT_CLIFFORD_ORDER}"
        )
    return CliffordTable(np.stack(elements), index_of)


# ---------------------------------------------------------------------------
# brickwork geometry and template sampling
# ---------------------------------------------------------------------------

def brickwork_pairs(n_qubits: int, layer: int) -> list:
    """Nearest-neighbour pairs coupled in one sublayer, open boundaries.

    Even sublayers couple (0,1), (2,3), ...; odd sublayers couple
    (1,2), (3,4), ...  Odd ``n_qubits`` leaves one qubit idle per sublayer.
    """
    first = 0 if layer % 2 == 0 else 1
    return [(q, q + 1) for q in range(first, n_qubits - 1, 2)]


@dataclass
class CircuitTemplate:
    """One realized brickwork layout: per slot, a Clifford index or CT."""

    n_qubits: int
    depth: int
    ct_probability: float
    seed: int
    layers: np.ndarray   # slot sublayer indices
    pairs: np.ndarray    # (n_slots, 2) qubit pairs
    choices: np.ndarray  # Clifford index, or CT_CHOICE

    @property
    def n_slots(self) -> int:
        return len(self.choices)

    @property
    def n_sublayers(self) -> int:
        return 2 * self.depth

    @property
    def ct_count(self) -> int:
        return int(np.sum(self.choices == CT_CHOICE))

    @classmethod
    def from_seed(cls, n_qubits: int, depth: int, ct_probability: float,
                  seed: int) -> "CircuitTemplate":
        """Deterministically regenerate the template for a stored seed."""
        if n_qubits < 2:
            raise ValueError("brickwork needs at least 2 qubits")
        if depth < 0:
            raise ValueError("depth must be nonnegative")
        if not 0.0 <= ct_probability <= 1.0:
            raise ValueError(f"ct_probability {ct_probability} outside [0, 1]")
        rng = make_rng(seed)
        layers, pairs = [], []
        for layer in range(2 * depth):
            for pair in brickwork_pairs(n_qubits, layer):
                layers.append(layer)
                pairs.append(pair)
        n_slots = len(layers)
        choices = np.empty(n_slots, dtype=np.int64)
        for i in range(n_slots):
            if rng.random() < ct_probability:
                choices[i] = CT_CHOICE
            else:
                choices[i] = rng.integers(TWO_QUBIT_CLIFFORD_ORDER)
        return cls(
            n_qubits=n_qubits,
            depth=depth,
            ct_probability=ct_probability,
            seed=int(seed),
            layers=np.asarray(layers, dtype=np.int64),
            pairs=np.asarray(pairs, dtype=np.int64).reshape(n_slots, 2),
            choices=choices,
        )

    def to_json(self, include_slots: bool = False) -> str:
        record = {
            "n_qubits": self.n_qubits,
            "depth": self.depth,
            "ct_probability": self.ct_probability,
            "seed": self.seed,
        }
        if include_slots:
            record["slots"] = [
                [int(l), int(a), int(b), int(c)]
                for l, (a, b), c in zip(self.layers, self.pairs, self.choices)
            ]
        return json.dumps(record, sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "CircuitTemplate":
        record = json.loads(text)
        template = cls.from_seed(
            record["n_qubits"], record["depth"],
            record["ct_probability"], record["seed"],
        )
        if "slots" in record:
            stored = np.asarray([row[3] for row in record["slots"]], dtype=np.int64)
            if not np.array_equal(stored, template.choices):
                raise ValueError("stored slots disagree with regenerated template")
        return template


def sample_template(n_qubits: int, depth: int, ct_probability: float,
                    rng: np.random.Generator) -> CircuitTemplate:
    """Draw one brickwork realization; each slot is CT with probability p."""
    seed = int(rng.integers(0, 2**64, dtype=np.uint64))
    return CircuitTemplate.from_seed(n_qubits, depth, ct_probability, seed)


def encoding_layer(theta: float, memory_qubits) -> list:
    """Input-encoding rotations exp(-i Y theta / 2), one per memory qubit."""
    gate = rotation_y(theta)
    return [(gate, int(q)) for q in memory_qubits]


def apply_template(state, template: CircuitTemplate,
                   table: CliffordTable | None = None,
                   max_sublayer: int | None = None) -> None:
    """Apply the template's slots to ``state`` in layer order, in place.

    ``max_sublayer`` truncates the circuit after that many sublayers
    (two per depth unit), which is how depth-resolved entanglement
    curves are recorded at half-brick granularity.
    """
    if state.n_qubits != template.n_qubits:
        raise ValueError(
            f"state has {state.n_qubits} qubits, template expects "
            f"{template.n_qubits}"
        )
    if table is None:
        table = build_clifford_table()
    ct = conditional_t()
    for layer, (a, b), choice in zip(template.layers, template.pairs,
                                     template.choices):
        if max_sublayer is not None and layer >= max_sublayer:
            break
        gate = ct if choice == CT_CHOICE else table.gate(int(choice))
        apply_gate(state, gate, (int(a), int(b)))
