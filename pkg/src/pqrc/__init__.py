"""Exact simulation of probabilistic quantum reservoirs built from
random Clifford brickwork doped with conditional-T gates, plus the
diagnostics (entanglement-spectrum statistics, mutual magic,
anti-flatness) and temporal-learning benchmarks used to study them.
"""

from .states import (
    DensityMatrix,
    StateVector,
    apply_gate,
    conditional_t,
    partial_trace,
    trace_distance,
)
from .rng import child_seed, make_rng, spawn_rng
from .circuits import (
    CT_CHOICE,
    CircuitTemplate,
    CliffordTable,
    apply_template,
    build_clifford_table,
    sample_template,
)
from .spectra import (
    EntanglementSpectrum,
    SpectrumStats,
    collapse_spread,
    entanglement_entropy,
    entanglement_spectrum,
    entanglement_velocity,
    fit_exp_decay,
    fit_linear,
    gue_surmise_mean,
    gue_surmise_pdf,
    kl_to_gue,
    poisson_surmise_pdf,
    r_histogram,
    saturation_depth,
    saturation_value,
    spacing_ratios,
)
from .magic import (
    HaarReference,
    MagicReport,
    PauliCapError,
    PauliSpectrum,
    anti_flatness,
    haar_anti_flatness,
    haar_reference,
    mutual_magic,
    pauli_transform,
    relative_gap,
    scrambling_exponent,
    sre2,
    sre2_from_spectrum,
)
from .reservoir import (
    ConvergenceResult,
    MemoryCurve,
    ReservoirConfig,
    TaskRun,
    capacity,
    convergence_rate,
    fit_readout,
    memory_task,
    narma_inputs,
    narma_targets,
    narma_task,
    run_sequence,
)
from .sweeps import (
    CrossoverEstimates,
    SweepSpec,
    load_config,
    locate_crossovers,
    run_diagnose,
    run_scaling,
    run_task,
)

__version__ = "0.1.0"

__all__ = [
    "CT_CHOICE",
    "CircuitTemplate",
    "CliffordTable",
    "ConvergenceResult",
    "CrossoverEstimates",
    "DensityMatrix",
    "EntanglementSpectrum",
    "HaarReference",
    "MagicReport",
    "MemoryCurve",
    "PauliCapError",
    "PauliSpectrum",
    "ReservoirConfig",
    "SpectrumStats",
    "StateVector",
    "SweepSpec",
    "TaskRun",
    "anti_flatness",
    "apply_gate",
    "apply_template",
    "build_clifford_table",
    "capacity",
    "child_seed",
    "collapse_spread",
    "conditional_t",
    "convergence_rate",
    "entanglement_entropy",
    "entanglement_spectrum",
    "entanglement_velocity",
    "fit_exp_decay",
    "fit_linear",
    "fit_readout",
    "gue_surmise_mean",
    "gue_surmise_pdf",
    "haar_anti_flatness",
    "haar_reference",
    "kl_to_gue",
    "load_config",
    "locate_crossovers",
    "make_rng",
    "memory_task",
    "mutual_magic",
    "narma_inputs",
    "narma_targets",
    "narma_task",
    "partial_trace",
    "pauli_transform",
    "poisson_surmise_pdf",
    "r_histogram",
    "relative_gap",
    "run_diagnose",
    "run_scaling",
    "run_sequence",
    "run_task",
    "saturation_depth",
    "saturation_value",
    "sample_template",
    "scrambling_exponent",
    "spacing_ratios",
    "spawn_rng",
    "sre2",
    "sre2_from_spectrum",
    "trace_distance",
]
