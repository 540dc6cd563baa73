"""Temporal-learning benchmarks on the doped-Clifford reservoir.

Sweeps the conditional-T density p at fixed size and shows the shape
that matters: delay-memory capacity is poor in the stabilizer limit,
peaks at moderate doping, and degrades again when the circuit is
saturated with non-Clifford slots.  NARMA tracks the same interior
optimum, and a trace-distance probe certifies the echo-state property.
"""

import numpy as np

from pqrc.circuits import CircuitTemplate, build_clifford_table
from pqrc.reservoir import (
    ReservoirConfig,
    convergence_rate,
    memory_task,
    narma_task,
)
from pqrc.rng import spawn_rng

N = 6
DEPTH = 2 * N
REALIZATIONS = 5
SEED = 31
DOPINGS = (0.0, 0.02, 0.1, 0.3, 0.6, 0.9)

table = build_clifford_table()


def config(p: float, seed: int) -> ReservoirConfig:
    return ReservoirConfig(
        n_qubits=N, depth=DEPTH, ct_probability=p, template_seed=seed,
        washout=30, steps=260,
    )


print(f"N={N}, depth={DEPTH}, {REALIZATIONS} template realizations per p")
print("\n    p     mean C_tau   C_0      C_1      NARMA10 cap")
for i_p, p in enumerate(DOPINGS):
    mean_caps, c0, c1, narma = [], [], [], []
    for r in range(REALIZATIONS):
        cfg = config(p, seed=1000 * i_p + r)
        template = cfg.template()
        curve = memory_task(cfg, template, spawn_rng(SEED, i_p, r), table=table)
        mean_caps.append(curve.mean_capacity)
        c0.append(curve.capacities[0])
        c1.append(curve.capacities[1])
        narma.append(narma_task(cfg, template, order=10, table=table).capacity)
    print(f"  {p:4.2f}     {np.mean(mean_caps):8.4f}   {np.mean(c0):.4f}"
          f"   {np.mean(c1):.4f}     {np.mean(narma):.4f}")

# echo-state probe at the memory-friendly doping
cfg = config(0.3, seed=7)
rng = spawn_rng(SEED, 99)
dim = 2 ** len(cfg.memory_qubits)
rho_a = np.zeros((dim, dim), dtype=complex)
rho_a[0, 0] = 1.0
rho_b = np.eye(dim, dtype=complex) / dim
res = convergence_rate(
    cfg, cfg.template(), cfg.input_scale * rng.random(120), rho_a, rho_b, table
)
print(f"\necho-state probe at p=0.3: D(n) = D0 2^(-eta n) with "
      f"eta = {res.eta:.3f} (r^2 = {res.r_squared:.4f}), "
      f"converged = {res.converged}")
print("positive eta: the memory register forgets its initial condition, "
      "so the trained readout is well defined.")
