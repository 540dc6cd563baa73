"""Entanglement-spectrum statistics across the doping range.

At p=0 the reduced spectrum of a Clifford-evolved state is exactly flat
and gap ratios are undefined; a little doping lifts the degeneracy and
the ratios approach the GUE surmise; near p=1 the circuit is mostly
diagonal and level repulsion is lost again.
"""

import numpy as np

from pqrc.circuits import apply_template, build_clifford_table, sample_template
from pqrc.rng import spawn_rng
from pqrc.spectra import (
    POISSON_MEAN_R,
    entanglement_spectrum,
    gue_surmise_mean,
    kl_to_gue,
    spacing_ratios,
)
from pqrc.states import StateVector, partial_trace

N = 10
DEPTH = 2 * N
REALIZATIONS = 20
SEED = 11

table = build_clifford_table()
keep = tuple(range(N // 2))

print(f"N={N}, depth={DEPTH}, {REALIZATIONS} realizations per doping")
print(f"GUE surmise mean r = {gue_surmise_mean():.4f}, "
      f"Poisson mean r = {POISSON_MEAN_R:.4f}\n")
print("    p   available   degeneracy   <r>      KL(GUE)")
for i_p, p in enumerate((0.0, 0.05, 0.1, 0.3, 0.7, 0.95)):
    pooled, degeneracies = [], []
    for r in range(REALIZATIONS):
        rng = spawn_rng(SEED, i_p, r)
        template = sample_template(N, DEPTH, p, rng)
        psi = StateVector.zero(N)
        apply_template(psi, template, table)
        spectrum = entanglement_spectrum(partial_trace(psi, keep))
        degeneracies.append(spectrum.degeneracy_fraction)
        stats = spacing_ratios(spectrum)
        if stats.available:
            pooled.append(stats.r_values)
    if pooled:
        allr = np.concatenate(pooled)
        r_txt = f"{allr.mean():.4f}   {kl_to_gue(allr):.4f}"
    else:
        r_txt = "   -        -"
    print(f"  {p:4.2f}   {len(pooled):3d}/{REALIZATIONS}      "
          f"{np.mean(degeneracies):8.3f}   {r_txt}")

print("\nthe flat (degenerate) stabilizer spectrum reports no ratios at all;"
      "\nmoderate doping sits on the GUE value, heavy doping drifts off it.")
