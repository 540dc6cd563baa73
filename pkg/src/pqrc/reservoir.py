"""Temporal-learning pipeline: the iterated reservoir channel.

One step of the channel encodes a scalar input as Y rotations on the
memory qubits, evolves by the fixed circuit template, measures diagonal
observables on the readout qubits, then traces the readout register out
and re-tensors it as |0...0>:

    rho_{n+1} = Tr_R( U_n rho_n U_n^dag ) (x) |0><0|^R,
    U_n = U_res (prod_{j in M} RY_j(theta_n)).

Because every post-reset state factorizes as rho_M (x) |0><0|_R, a full
density-matrix evolution is never needed for trajectories started in
that form.  The template restricted to the readout-zero subspace is a
2^N x 2^|M| isometry W; one step is rho' = Tr_R(W A W^dag) with
A = R(theta) rho_M R(theta)^dag, and the measured probabilities are the
diagonal of W A W^dag.  The literal full-matrix channel is kept as
``step`` and the two routes are asserted equal in tests.

Readout features are standardized with training-set statistics only and
fed to a ridge regression; performance is the squared correlation
capacity C = cov(y, yhat)^2 / (var(y) var(yhat)).
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, replace

import numpy as np

from .circuits import (
    CT_CHOICE,
    CircuitTemplate,
    CliffordTable,
    apply_template,
    build_clifford_table,
)
from .spectra import fit_exp_decay
from .states import (
    DensityMatrix,
    apply_gate,
    conditional_t,
    partial_trace,
    rotation_y,
    trace_distance,
)

TRACE_DRIFT_ATOL = 1e-8
DEFAULT_WASHOUT = 500
DEFAULT_STEPS = 2000
DEFAULT_RIDGE_LAMBDA = 1e-8
DEFAULT_TRAIN_FRACTION = 0.7
DEFAULT_INPUT_SCALE = 1e-3
MEAN_CAPACITY_TAUS = range(1, 13)

NARMA_ALPHA, NARMA_BETA, NARMA_GAMMA, NARMA_DELTA = 0.3, 0.05, 1.5, 0.1
NARMA_INPUT_FREQS = (2.11, 3.73, 4.11)
NARMA_INPUT_PERIOD = 100.0


@dataclass(frozen=True)
class ReservoirConfig:
    """Static description of one reservoir instance.

    memory_qubits receive the input rotations; readout_qubits are
    measured and reset each step.  The two sets partition all qubits and
    default to the first/second half (equal sizes).
    """

    n_qubits: int
    depth: int
    ct_probability: float
    template_seed: int
    memory_qubits: tuple = ()
    readout_qubits: tuple = ()
    input_scale: float = DEFAULT_INPUT_SCALE
    washout: int = DEFAULT_WASHOUT
    steps: int = DEFAULT_STEPS
    ridge_lambda: float = DEFAULT_RIDGE_LAMBDA
    train_fraction: float = DEFAULT_TRAIN_FRACTION
    feature_set: str = "readout"  # or "all": include memory-qubit observables

    def __post_init__(self):
        if not self.memory_qubits and not self.readout_qubits:
            half = self.n_qubits // 2
            object.__setattr__(self, "memory_qubits", tuple(range(half)))
            object.__setattr__(
                self, "readout_qubits", tuple(range(half, self.n_qubits))
            )
        mem, read = set(self.memory_qubits), set(self.readout_qubits)
        if mem & read:
            raise ValueError("memory and readout qubits overlap")
        if mem | read != set(range(self.n_qubits)):
            raise ValueError("memory and readout must partition the qubits")
        if not mem or not read:
            raise ValueError("both memory and readout must be nonempty")
        if not 0 <= self.washout < self.steps:
            raise ValueError("washout must satisfy 0 <= washout < steps")
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("train_fraction must lie in (0, 1)")
        if self.feature_set not in ("readout", "all"):
            raise ValueError(f"unknown feature_set {self.feature_set!r}")

    def template(self) -> CircuitTemplate:
        return CircuitTemplate.from_seed(
            self.n_qubits, self.depth, self.ct_probability, self.template_seed
        )


def feature_names(cfg: ReservoirConfig) -> list:
    qubits = (
        cfg.readout_qubits
        if cfg.feature_set == "readout"
        else tuple(range(cfg.n_qubits))
    )
    names = [f"z{q}" for q in qubits]
    names += [
        f"zz{a}_{b}" for i, a in enumerate(qubits) for b in qubits[i + 1 :]
    ]
    names.append("bias")
    return names


def _observable_signs(cfg: ReservoirConfig) -> np.ndarray:
    """Rows of +-1 signs mapping basis probabilities to feature values.

    Feature f of the pre-reset state is signs[f] @ diag(rho); the last
    row is all ones (bias).
    """
    n = cfg.n_qubits
    qubits = (
        cfg.readout_qubits
        if cfg.feature_set == "readout"
        else tuple(range(n))
    )
    basis = np.arange(1 << n)
    z = np.empty((len(qubits), 1 << n))
    for k, q in enumerate(qubits):
        bit = (basis >> (n - 1 - q)) & 1  # qubit 0 is the most significant bit
        z[k] = 1.0 - 2.0 * bit
    rows = [z[k] for k in range(len(qubits))]
    rows += [
        z[i] * z[j]
        for i in range(len(qubits))
        for j in range(i + 1, len(qubits))
    ]
    rows.append(np.ones(1 << n))
    return np.array(rows)


def _memory_rotation(theta: float, n_memory: int) -> np.ndarray:
    """RY(theta) on every memory qubit, as a dense 2^m x 2^m block."""
    single = rotation_y(theta).matrix
    out = single
    for _ in range(n_memory - 1):
        out = np.kron(out, single)
    return out


def _embed_with_reset(rho_m: DensityMatrix, cfg: ReservoirConfig) -> DensityMatrix:
    """rho_M (x) |0><0|_R arranged back onto the original qubit order."""
    n = cfg.n_qubits
    n_read = len(cfg.readout_qubits)
    ground = np.zeros((1 << n_read, 1 << n_read), dtype=np.complex128)
    ground[0, 0] = 1.0
    full = np.kron(rho_m.matrix, ground)
    order = list(cfg.memory_qubits) + list(cfg.readout_qubits)
    perm = np.argsort(order)  # tensor axis j holds qubit order[j]
    tensor = full.reshape((2,) * (2 * n))
    tensor = np.transpose(tensor, tuple(perm) + tuple(perm + n))
    return DensityMatrix(n_qubits=n, matrix=tensor.reshape(1 << n, 1 << n).copy())


def step(
    rho: DensityMatrix,
    theta: float,
    cfg: ReservoirConfig,
    template: CircuitTemplate,
    table: CliffordTable | None = None,
):
    """One literal channel application on a full density matrix.

    Returns (next state, feature vector measured before the reset).
    This is the reference route; run_sequence uses the equivalent
    memory-subspace iteration.
    """
    if table is None:
        table = build_clifford_table()
    work = rho.copy()
    gate = rotation_y(theta)
    for q in cfg.memory_qubits:
        apply_gate(work, gate, (q,))
    apply_template(work, template, table)
    probs = np.real(np.diag(work.matrix))
    features = _observable_signs(cfg) @ probs
    rho_m = partial_trace(work, keep=cfg.memory_qubits)
    out = _embed_with_reset(rho_m, cfg)
    drift = abs(out.trace() - 1.0)
    if drift > TRACE_DRIFT_ATOL:
        raise RuntimeError(f"trace drift {drift:.3e} exceeds {TRACE_DRIFT_ATOL}")
    return out, features


class _FastChannel:
    """Memory-subspace form of the channel for factorized states.

    W holds the template columns on the readout-zero subspace, reshaped
    to (memory out, readout out, memory in).
    """

    def __init__(self, cfg: ReservoirConfig, template: CircuitTemplate,
                 table: CliffordTable | None = None):
        if table is None:
            table = build_clifford_table()
        n = cfg.n_qubits
        n_mem = len(cfg.memory_qubits)
        dim, mdim = 1 << n, 1 << n_mem
        self.cfg = cfg
        self.n_mem = n_mem
        # isometry: basis state |a>_M (x) |0>_R for each memory index a
        cols = np.zeros((dim, mdim), dtype=np.complex128)
        shifts = [n - 1 - q for q in cfg.memory_qubits]
        for a in range(mdim):
            row = 0
            for k, shift in enumerate(shifts):
                bit = (a >> (n_mem - 1 - k)) & 1
                row |= bit << shift
            cols[row, a] = 1.0
        ct = conditional_t().matrix
        tensor = cols.reshape((2,) * n + (mdim,))
        for (a, b), choice in zip(template.pairs, template.choices):
            mat = ct if choice == CT_CHOICE else table[int(choice)]
            tensor = _apply_two_qubit(tensor, mat, int(a), int(b), n)
        w = tensor.reshape(dim, mdim)
        # regroup rows as (memory bits, readout bits)
        axes_order = list(cfg.memory_qubits) + list(cfg.readout_qubits)
        tensor = w.reshape((2,) * n + (mdim,))
        tensor = np.transpose(tensor, tuple(axes_order) + (n,))
        self.w_flat = np.ascontiguousarray(tensor.reshape(dim, mdim))
        self.w3 = self.w_flat.reshape(mdim, dim // mdim, mdim)
        self.signs = _observable_signs(cfg)
        # feature signs need basis order (memory bits, readout bits)
        basis_perm = np.transpose(
            np.arange(dim).reshape((2,) * n), axes_order
        ).reshape(-1)
        self.signs_grouped = self.signs[:, basis_perm]

    def apply(self, rho_m: np.ndarray, theta: float):
        """(next rho_M, features) for one input angle."""
        rot = _memory_rotation(theta, self.n_mem)
        a = rot @ rho_m @ rot.conj().T
        wa = self.w_flat @ a
        probs = np.einsum("ia,ia->i", wa, self.w_flat.conj()).real
        features = self.signs_grouped @ probs
        t1 = wa.reshape(self.w3.shape)
        rho_next = np.einsum("arb,crb->ac", t1, self.w3.conj())
        drift = abs(np.trace(rho_next).real - 1.0)
        if drift > TRACE_DRIFT_ATOL:
            raise RuntimeError(
                f"trace drift {drift:.3e} exceeds {TRACE_DRIFT_ATOL}"
            )
        return rho_next, features


def _apply_two_qubit(tensor, mat, a, b, n):
    """4x4 matrix on qubit axes (a, b) of a tensor with a trailing batch."""
    moved = np.moveaxis(tensor, (a, b), (0, 1))
    shape = moved.shape
    out = mat @ moved.reshape(4, -1)
    return np.moveaxis(out.reshape(shape), (0, 1), (a, b))


@dataclass
class FeatureMatrix:
    """Post-washout feature rows plus frozen standardization statistics.

    means/stds are filled by fit_readout from the training segment only;
    the bias column is exempt from standardization.
    """

    features: np.ndarray
    column_names: list
    washout: int
    means: np.ndarray | None = None
    stds: np.ndarray | None = None


def run_sequence(
    cfg: ReservoirConfig,
    template: CircuitTemplate,
    inputs: np.ndarray,
    table: CliffordTable | None = None,
    initial_memory: np.ndarray | None = None,
    return_memory_states: bool = False,
):
    """Drive the reservoir with an input sequence; collect features.

    inputs are the encoding angles, one per step (length cfg.steps
    unless overridden by the caller's array).  Rows are recorded only
    after the washout.  The trajectory starts from |0...0> unless an
    initial memory-register density matrix is given.
    """
    inputs = np.asarray(inputs, dtype=float)
    if inputs.ndim != 1 or inputs.size == 0:
        raise ValueError("inputs must be a nonempty 1-d array")
    if inputs.size <= cfg.washout:
        raise ValueError("no post-washout steps")
    channel = _FastChannel(cfg, template, table)
    mdim = 1 << len(cfg.memory_qubits)
    if initial_memory is None:
        rho_m = np.zeros((mdim, mdim), dtype=np.complex128)
        rho_m[0, 0] = 1.0
    else:
        rho_m = np.array(initial_memory, dtype=np.complex128)
        if rho_m.shape != (mdim, mdim):
            raise ValueError(f"initial memory state must be {mdim}x{mdim}")
    rows = []
    memory_states = []
    for n, theta in enumerate(inputs):
        rho_m, features = channel.apply(rho_m, theta)
        if n >= cfg.washout:
            rows.append(features)
        if return_memory_states:
            memory_states.append(rho_m.copy())
    matrix = FeatureMatrix(
        features=np.array(rows),
        column_names=feature_names(cfg),
        washout=cfg.washout,
    )
    if return_memory_states:
        return matrix, memory_states
    return matrix


def capacity(y: np.ndarray, y_hat: np.ndarray) -> float:
    """Squared correlation C = cov(y, yhat)^2 / (var(y) var(yhat))."""
    y = np.asarray(y, dtype=float)
    y_hat = np.asarray(y_hat, dtype=float)
    vy = np.var(y)
    vh = np.var(y_hat)
    if vy <= 0 or vh <= 0:
        return 0.0
    c = np.cov(y, y_hat, bias=True)[0, 1]
    return float(c * c / (vy * vh))


@dataclass
class TaskRun:
    """Fitted readout on one task: targets, test predictions, metrics."""

    task: str
    weights: np.ndarray
    targets_test: np.ndarray
    predictions_test: np.ndarray
    capacity: float
    nmse: float


def fit_readout(
    matrix: FeatureMatrix,
    targets: np.ndarray,
    ridge_lambda: float = DEFAULT_RIDGE_LAMBDA,
    train_fraction: float = DEFAULT_TRAIN_FRACTION,
    task: str = "custom",
) -> TaskRun:
    """Ridge regression on standardized features, contiguous 70/30 split.

    Standardization statistics come from the training rows alone and are
    frozen onto the matrix; the capacity metric is evaluated on the
    held-out test segment.
    """
    x = matrix.features
    y = np.asarray(targets, dtype=float)
    if y.shape[0] != x.shape[0]:
        raise ValueError("targets length must match feature rows")
    n_train = int(round(train_fraction * x.shape[0]))
    if n_train < 2 or n_train >= x.shape[0]:
        raise ValueError("split leaves an empty train or test segment")
    if n_train < 2 * x.shape[1]:
        warnings.warn(
            f"{n_train} training rows for {x.shape[1]} features",
            stacklevel=2,
        )
    bias_col = np.array([name == "bias" for name in matrix.column_names])
    means = x[:n_train].mean(axis=0)
    stds = x[:n_train].std(axis=0)
    means[bias_col] = 0.0
    stds[bias_col] = 1.0
    stds[stds == 0.0] = 1.0  # constant column: centered to zero, left alone
    matrix.means, matrix.stds = means, stds
    xs = (x - means) / stds
    x_tr, x_te = xs[:n_train], xs[n_train:]
    y_tr, y_te = y[:n_train], y[n_train:]
    gram = x_tr.T @ x_tr + ridge_lambda * np.eye(x.shape[1])
    rhs = x_tr.T @ y_tr
    try:
        weights = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        warnings.warn("singular normal equations; using pseudoinverse",
                      stacklevel=2)
        weights = np.linalg.pinv(gram) @ rhs
    y_hat = x_te @ weights
    var_te = np.var(y_te)
    nmse = float(np.mean((y_te - y_hat) ** 2) / var_te) if var_te > 0 else np.nan
    return TaskRun(
        task=task,
        weights=weights,
        targets_test=y_te,
        predictions_test=y_hat,
        capacity=capacity(y_te, y_hat),
        nmse=nmse,
    )


@dataclass
class MemoryCurve:
    """Delay-reconstruction capacities C_tau from one trajectory."""

    taus: np.ndarray
    capacities: np.ndarray
    mean_capacity: float  # mean over 1 <= tau <= 12


def memory_task(
    cfg: ReservoirConfig,
    template: CircuitTemplate,
    rng: np.random.Generator,
    max_tau: int = 20,
    table: CliffordTable | None = None,
) -> MemoryCurve:
    """Delay-memory benchmark: reconstruct u_{n-tau} from step-n features.

    Inputs are uniform [0, 1) draws scaled by cfg.input_scale at the
    encoder; the unscaled draws serve as targets (capacity is
    scale-invariant).  One trajectory is run and one readout is fitted
    per delay.
    """
    if max_tau >= cfg.washout:
        raise ValueError("max_tau must stay below the washout")
    u = rng.random(cfg.steps)
    matrix = run_sequence(cfg, template, cfg.input_scale * u, table)
    rows = np.arange(cfg.washout, cfg.steps)
    taus = np.arange(0, max_tau + 1)
    caps = np.empty(taus.size)
    for k, tau in enumerate(taus):
        run = fit_readout(
            matrix, u[rows - tau], cfg.ridge_lambda, cfg.train_fraction,
            task=f"memory_tau{tau}",
        )
        caps[k] = run.capacity
    in_window = (taus >= MEAN_CAPACITY_TAUS.start) & (taus < MEAN_CAPACITY_TAUS.stop)
    return MemoryCurve(
        taus=taus,
        capacities=caps,
        mean_capacity=float(np.mean(caps[in_window])),
    )


def narma_inputs(steps: int) -> np.ndarray:
    """Deterministic product-of-sines input series on [0, 0.2]."""
    n = np.arange(steps, dtype=float)
    omega = 2.0 * np.pi / NARMA_INPUT_PERIOD
    prod = np.ones(steps)
    for x in NARMA_INPUT_FREQS:
        prod *= np.sin(omega * x * n)
    return 0.1 * (1.0 + prod)


def narma_targets(theta: np.ndarray, order: int) -> np.ndarray:
    """NARMA recursion with zero initial history; asserts boundedness.

    y[n+1] = a y[n] + b y[n] sum_{j<order} y[n-j] + c theta[n-order+1]
    theta[n] + d.
    """
    steps = theta.size
    y = np.zeros(steps + 1)
    for n in range(steps):
        window = y[max(0, n - order + 1) : n + 1].sum()
        drive = theta[n - order + 1] * theta[n] if n - order + 1 >= 0 else 0.0
        y[n + 1] = (
            NARMA_ALPHA * y[n]
            + NARMA_BETA * y[n] * window
            + NARMA_GAMMA * drive
            + NARMA_DELTA
        )
        if not np.isfinite(y[n + 1]) or abs(y[n + 1]) >= 1.0:
            raise RuntimeError(f"NARMA target diverged at step {n}")
    return y


def narma_task(
    cfg: ReservoirConfig,
    template: CircuitTemplate,
    order: int = 10,
    table: CliffordTable | None = None,
) -> TaskRun:
    """Nonlinear benchmark: fit the NARMA recursion driven by the input.

    The feature row recorded after processing theta_n is fitted to
    y_{n+1}, the first recursion value that depends on theta_n.
    """
    theta = narma_inputs(cfg.steps)
    y = narma_targets(theta, order)
    matrix = run_sequence(cfg, template, theta, table)
    targets = y[cfg.washout + 1 : cfg.steps + 1]
    return fit_readout(
        matrix, targets, cfg.ridge_lambda, cfg.train_fraction,
        task=f"narma{order}",
    )


@dataclass
class ConvergenceResult:
    """Trace-distance decay between two reservoir trajectories."""

    distances: np.ndarray
    d0: float
    eta: float  # base-2 decay exponent per step
    r_squared: float
    converged: bool


def convergence_rate(
    cfg: ReservoirConfig,
    template: CircuitTemplate,
    inputs: np.ndarray,
    rho_a: np.ndarray,
    rho_b: np.ndarray,
    table: CliffordTable | None = None,
    floor: float = 1e-12,
) -> ConvergenceResult:
    """Echo-state diagnostic: D(n) = D0 2^(-n eta) between two initials.

    Both memory-register states are driven by the identical input
    sequence; the trace distance of the memory registers is fitted to an
    exponential over the window above the numerical floor.  eta > 0
    certifies contractivity; a non-decaying distance is flagged.
    """
    rho_a = np.asarray(rho_a, dtype=np.complex128)
    rho_b = np.asarray(rho_b, dtype=np.complex128)
    if np.allclose(rho_a, rho_b, atol=1e-14):
        raise ValueError("initial states are identical; decay undefined")
    n_mem = len(cfg.memory_qubits)
    # the probe tracks the distance from step 0, so no washout applies
    inputs = np.asarray(inputs, dtype=float)
    probe_cfg = replace(cfg, washout=0, steps=inputs.size)
    _, states_a = run_sequence(
        probe_cfg, template, inputs, table,
        initial_memory=rho_a, return_memory_states=True,
    )
    _, states_b = run_sequence(
        probe_cfg, template, inputs, table,
        initial_memory=rho_b, return_memory_states=True,
    )
    dists = np.array([
        trace_distance(
            DensityMatrix(n_qubits=n_mem, matrix=a),
            DensityMatrix(n_qubits=n_mem, matrix=b),
        )
        for a, b in zip(states_a, states_b)
    ])
    # fit on the initial run of steps before the distance hits the floor
    below = np.nonzero(dists <= floor)[0]
    stop = below[0] if below.size else dists.size
    if stop < 3:
        warnings.warn("distance hit the floor immediately", stacklevel=2)
        return ConvergenceResult(dists, np.nan, np.inf, np.nan, True)
    window = np.arange(stop)
    d0, eta, r_squared = fit_exp_decay(window, dists[window])
    converged = eta > 0
    if not converged:
        warnings.warn(f"trace distance not decaying (eta={eta:.3g})",
                      stacklevel=2)
    return ConvergenceResult(dists, d0, eta, r_squared, converged)
