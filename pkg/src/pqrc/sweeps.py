"""Seeded parameter sweeps and their CSV/JSON emission.

A sweep enumerates a grid over (N, d/N, p), runs a fixed number of
realizations per grid point, and aggregates diagnostics or task metrics
with standard errors.  Every realization's RNG stream is derived from
(master seed, command code, point index, realization index) by a
splitmix-style hash, so serial and parallel execution produce identical
tables: workers may finish in any order, a canonical sort precedes
writing, and wall-clock timings go to meta.json, never into result
CSVs.  Rerunning a command with the same seed and config yields
byte-identical CSV files regardless of the worker count.
"""

from __future__ import annotations

import configparser
import csv
import json
import math
import multiprocessing
import time
from dataclasses import dataclass, asdict, replace
from pathlib import Path

import numpy as np

from . import circuits, magic, reservoir, spectra
from .rng import child_seed, make_rng
from .states import StateVector, partial_trace

# command codes folded into child seeds so streams never collide
CMD_DIAGNOSE, CMD_TASK, CMD_SCALING, CMD_HAAR = 1, 2, 3, 4

# locator constants: midpoint of the quoted chaotic/integrable limits,
# and the factor over the plateau that marks the mutual-magic upturn
R_MIDPOINT = (0.6 + 0.39) / 2.0
PLATEAU_FACTOR = 2.0
MONOTONE_TOL = 0.02


@dataclass(frozen=True)
class SweepSpec:
    """Grid, realization count, seeding, and knobs for one sweep."""

    n_values: tuple = (10,)
    d_over_n_values: tuple = (2,)
    p_values: tuple = (0.0, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9, 1.0)
    realizations: int = 50
    master_seed: int = 2024
    haar_samples: int = 200
    steps: int = reservoir.DEFAULT_STEPS
    washout: int = reservoir.DEFAULT_WASHOUT
    max_tau: int = 20
    narma_order: int = 10
    ridge_lambda: float = reservoir.DEFAULT_RIDGE_LAMBDA
    input_scale: float = reservoir.DEFAULT_INPUT_SCALE
    feature_set: str = "readout"
    probe_steps: int = 200
    out_dir: str = "pqrc_out"
    jobs: int = 1

    def __post_init__(self):
        if any(not 0.0 <= p <= 1.0 for p in self.p_values):
            raise ValueError("every p must lie in [0, 1]")
        if self.realizations < 1:
            raise ValueError("realizations must be >= 1")
        if any(n < 2 for n in self.n_values):
            raise ValueError("system sizes must be >= 2")
        if any(d <= 0 for d in self.d_over_n_values):
            raise ValueError("depth ratios must be positive")

    def points(self) -> list:
        """Canonical grid enumeration; the index seeds child streams."""
        return [
            (n, d_over_n, p)
            for n in self.n_values
            for d_over_n in self.d_over_n_values
            for p in self.p_values
        ]


_SMOKE_OVERRIDES = {
    "diagnose": dict(
        n_values=(6,), p_values=(0.0, 0.2, 0.5, 0.8), realizations=5,
        haar_samples=50,
    ),
    "task": dict(
        n_values=(6,), p_values=(0.0, 0.2, 0.5, 0.9), realizations=3,
        steps=600, washout=150, max_tau=8, probe_steps=80,
    ),
    "scaling": dict(
        n_values=(4, 6, 8), p_values=(0.0, 0.3), realizations=5,
        haar_samples=50,
    ),
    "haar-ref": dict(n_values=(4, 6), haar_samples=50),
}


def smoke_spec(spec: SweepSpec, command: str) -> SweepSpec:
    """Shrink a spec to the documented fast smoke grid for a command."""
    return replace(spec, **_SMOKE_OVERRIDES.get(command, {}))


# ---------------------------------------------------------------------------
# config file handling
# ---------------------------------------------------------------------------

_CONFIG_SCHEMA = {
    "sweep": {
        "n": "int_list",
        "d_over_n": "float_list",
        "p": "float_list",
        "realizations": "int",
        "seed": "int",
    },
    "reservoir": {
        "steps": "int",
        "washout": "int",
        "max_tau": "int",
        "narma_order": "int",
        "ridge_lambda": "float",
        "input_scale": "float",
        "feature_set": "str",
        "probe_steps": "int",
    },
    "haar": {"samples": "int"},
    "output": {"dir": "str"},
}

_KEY_TO_FIELD = {
    ("sweep", "n"): "n_values",
    ("sweep", "d_over_n"): "d_over_n_values",
    ("sweep", "p"): "p_values",
    ("sweep", "realizations"): "realizations",
    ("sweep", "seed"): "master_seed",
    ("reservoir", "steps"): "steps",
    ("reservoir", "washout"): "washout",
    ("reservoir", "max_tau"): "max_tau",
    ("reservoir", "narma_order"): "narma_order",
    ("reservoir", "ridge_lambda"): "ridge_lambda",
    ("reservoir", "input_scale"): "input_scale",
    ("reservoir", "feature_set"): "feature_set",
    ("reservoir", "probe_steps"): "probe_steps",
    ("haar", "samples"): "haar_samples",
    ("output", "dir"): "out_dir",
}


def _parse_value(kind: str, raw: str):
    if kind == "int":
        return int(raw)
    if kind == "float":
        return float(raw)
    if kind == "str":
        return raw.strip()
    if kind == "int_list":
        return tuple(int(tok) for tok in raw.replace(",", " ").split())
    if kind == "float_list":
        return tuple(float(tok) for tok in raw.replace(",", " ").split())
    raise AssertionError(kind)


def load_config(path: str | Path, base: SweepSpec | None = None) -> SweepSpec:
    """Read an INI config and overlay it on a base spec.

    Unknown sections or keys are errors: sweeps have too many knobs for
    silent typos.
    """
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise FileNotFoundError(path)
    updates = {}
    for section in parser.sections():
        if section not in _CONFIG_SCHEMA:
            raise ValueError(f"unknown config section [{section}]")
        for key, raw in parser[section].items():
            if key not in _CONFIG_SCHEMA[section]:
                raise ValueError(f"unknown config key {key!r} in [{section}]")
            updates[_KEY_TO_FIELD[(section, key)]] = _parse_value(
                _CONFIG_SCHEMA[section][key], raw
            )
    return replace(base or SweepSpec(), **updates)


# ---------------------------------------------------------------------------
# deterministic CSV emission
# ---------------------------------------------------------------------------

def _fmt(value) -> str:
    """Stable scalar formatting; NaN/None become empty cells."""
    if value is None:
        return ""
    # bool before int: Python bools are ints and would print as 0/1
    if isinstance(value, (np.bool_, bool)):
        return str(bool(value))
    if isinstance(value, (np.floating, float)):
        value = float(value)
        if math.isnan(value):
            return ""
        return repr(value)
    if isinstance(value, (np.integer, int)):
        return str(int(value))
    return str(value)


def write_csv(path: Path, header: list, rows: list) -> None:
    """Write dict rows against a declared header; extras are errors."""
    for row in rows:
        unknown = set(row) - set(header)
        if unknown:
            raise ValueError(f"row fields {unknown} not in declared header")
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(row.get(col)) for col in header])


def _mean_se(values) -> tuple:
    arr = np.asarray([v for v in values if v is not None and not math.isnan(v)],
                     dtype=float)
    if arr.size == 0:
        return math.nan, math.nan
    if arr.size == 1:
        return float(arr[0]), math.nan
    return float(arr.mean()), float(arr.std(ddof=1) / math.sqrt(arr.size))


def write_meta(out_dir: Path, command: str, spec: SweepSpec,
               wall_time: float, files: list) -> None:
    import scipy

    from . import __version__

    meta = {
        "command": command,
        "spec": asdict(spec),
        "versions": {
            "pqrc": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
        },
        "wall_time_s": wall_time,
        "files": sorted(files),
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / "meta.json").write_text(json.dumps(meta, indent=1, sort_keys=True))


def _run_pool(worker, items, jobs: int) -> list:
    if jobs <= 1 or len(items) <= 1:
        return [worker(item) for item in items]
    with multiprocessing.Pool(processes=jobs) as pool:
        return pool.map(worker, items)


# ---------------------------------------------------------------------------
# diagnose: entanglement + magic sweep
# ---------------------------------------------------------------------------

def _depth_bricks(n: int, d_over_n: float) -> int:
    depth = int(round(d_over_n * n))
    if depth < 1:
        raise ValueError(f"depth ratio {d_over_n} too small for N={n}")
    return depth


def _entropy_curve(psi: StateVector, template, table, keep) -> np.ndarray:
    """Half-cut entropy after each sublayer (index 0 = initial state)."""
    curve = [0.0]
    ct = circuits.conditional_t()
    slot = 0
    layers, pairs, choices = template.layers, template.pairs, template.choices
    for layer in range(template.n_sublayers):
        while slot < template.n_slots and layers[slot] == layer:
            a, b = pairs[slot]
            choice = choices[slot]
            gate = ct if choice == circuits.CT_CHOICE else table.gate(int(choice))
            circuits.apply_gate(psi, gate, (int(a), int(b)))
            slot += 1
        rho = partial_trace(psi, keep)
        curve.append(spectra.entanglement_entropy(rho))
    return np.asarray(curve)


def _diagnose_one(args):
    spec, point_index, realization = args
    n, d_over_n, p = spec.points()[point_index]
    depth = _depth_bricks(n, d_over_n)
    rng = make_rng(child_seed(spec.master_seed, CMD_DIAGNOSE,
                              point_index, realization))
    table = circuits.build_clifford_table()
    template = circuits.sample_template(n, depth, p, rng)
    psi = StateVector.zero(n)
    keep = tuple(range(n // 2))
    curve = _entropy_curve(psi, template, table, keep)

    rho = partial_trace(psi, keep)
    spectrum = spectra.entanglement_spectrum(rho)
    stats = spectra.spacing_ratios(spectrum)
    row = {
        "n_qubits": n,
        "d_over_n": d_over_n,
        "depth": depth,
        "p": p,
        "realization": realization,
        "template_seed": template.seed,
        "ct_count": template.ct_count,
        "s_final": float(curve[-1]),
        "degeneracy_fraction": spectrum.degeneracy_fraction,
        "mean_r": stats.mean_r,
        "n_ratios": int(stats.r_values.size),
        "sre_total": math.nan,
        "sre_m": math.nan,
        "sre_r": math.nan,
        "mutual_magic": math.nan,
        "anti_flatness": math.nan,
        "magic_capped": False,
    }
    if n <= magic.PAULI_CAP_QUBITS:
        report = magic.mutual_magic(psi, cut=n // 2)
        row.update(
            sre_total=report.total_magic,
            sre_m=report.magic_m,
            sre_r=report.magic_r,
            mutual_magic=report.mutual_magic,
            anti_flatness=report.anti_flatness,
        )
    else:
        row["magic_capped"] = True
    return point_index, realization, row, curve, stats.r_values


DIAGNOSE_RESULT_COLUMNS = [
    "n_qubits", "d_over_n", "depth", "p", "realization", "template_seed",
    "ct_count", "s_final", "degeneracy_fraction", "mean_r", "n_ratios",
    "sre_total", "sre_m", "sre_r", "mutual_magic", "delta_i",
    "delta_i_above_1", "anti_flatness", "magic_capped",
]

DIAGNOSE_SUMMARY_COLUMNS = [
    "n_qubits", "d_over_n", "depth", "p", "realizations", "available_ratio_sets",
    "s_final_mean", "s_final_se", "degeneracy_fraction_mean",
    "mean_r_mean", "mean_r_se", "pooled_mean_r", "kl_to_gue",
    "sre_total_mean", "sre_total_se", "mutual_magic_mean", "mutual_magic_se",
    "delta_i_mean", "delta_i_se", "anti_flatness_mean", "anti_flatness_se",
    "haar_mutual_magic", "haar_magic", "haar_anti_flatness",
]


def run_diagnose(spec: SweepSpec):
    """Spectral and magic diagnostics over the (N, d/N, p) grid.

    Returns (results rows, summary rows, curve rows, histogram rows);
    see the matching *_COLUMNS lists for schemas.
    """
    points = spec.points()
    items = [
        (spec, i, r)
        for i in range(len(points))
        for r in range(spec.realizations)
    ]
    outcomes = _run_pool(_diagnose_one, items, spec.jobs)
    outcomes.sort(key=lambda t: (t[0], t[1]))

    haar_refs = {}
    for n in spec.n_values:
        if n <= magic.PAULI_CAP_QUBITS:
            haar_refs[n] = magic.haar_reference(
                n, spec.haar_samples, spec.master_seed,
                cache_path=Path(spec.out_dir) / "haar_reference.json",
            )

    results, summary, curve_rows, hist_rows = [], [], [], []
    for point_index, (n, d_over_n, p) in enumerate(points):
        group = [t for t in outcomes if t[0] == point_index]
        rows = []
        for _, _, row, _, _ in group:
            row = dict(row)
            ref = haar_refs.get(n)
            if ref is not None and not math.isnan(row["mutual_magic"]):
                gap = magic.relative_gap(row["mutual_magic"], ref.mean_mutual)
                row["delta_i"] = gap
                row["delta_i_above_1"] = gap > 1.0
            else:
                row["delta_i"] = math.nan
                row["delta_i_above_1"] = False
            rows.append(row)
        results.extend(rows)

        curves = np.stack([t[3] for t in group])
        depth = rows[0]["depth"]
        for sublayer in range(curves.shape[1]):
            mean, se = _mean_se(curves[:, sublayer])
            curve_rows.append({
                "n_qubits": n, "d_over_n": d_over_n, "p": p,
                "sublayer": sublayer, "d_bricks": sublayer / 2.0,
                "s_mean": mean, "s_se": se,
            })

        pooled = [t[4] for t in group if t[4].size]
        ref = haar_refs.get(n)
        point_summary = {
            "n_qubits": n, "d_over_n": d_over_n, "depth": depth, "p": p,
            "realizations": len(rows),
            "available_ratio_sets": len(pooled),
            "haar_mutual_magic": ref.mean_mutual if ref else math.nan,
            "haar_magic": ref.mean_magic if ref else math.nan,
            "haar_anti_flatness": ref.mean_anti_flatness if ref else math.nan,
        }
        for col in ("s_final", "mean_r", "sre_total", "mutual_magic",
                    "delta_i", "anti_flatness"):
            mean, se = _mean_se([row[col] for row in rows])
            point_summary[f"{col}_mean"] = mean
            point_summary[f"{col}_se"] = se
        point_summary["degeneracy_fraction_mean"], _ = _mean_se(
            [row["degeneracy_fraction"] for row in rows]
        )
        if pooled:
            allr = np.concatenate(pooled)
            point_summary["pooled_mean_r"] = float(allr.mean())
            point_summary["kl_to_gue"] = spectra.kl_to_gue(allr)
            centers, emp, ref_density = spectra.r_histogram(allr)
            for c, e, s in zip(centers, emp, ref_density):
                hist_rows.append({
                    "n_qubits": n, "d_over_n": d_over_n, "p": p,
                    "r_bin_center": float(c),
                    "empirical_density": float(e),
                    "surmise_density": float(s),
                })
        else:
            point_summary["pooled_mean_r"] = math.nan
            point_summary["kl_to_gue"] = math.nan
        summary.append(point_summary)
    return results, summary, curve_rows, hist_rows


CURVE_COLUMNS = ["n_qubits", "d_over_n", "p", "sublayer", "d_bricks",
                 "s_mean", "s_se"]
HIST_COLUMNS = ["n_qubits", "d_over_n", "p", "r_bin_center",
                "empirical_density", "surmise_density"]


def cmd_diagnose(spec: SweepSpec) -> dict:
    t0 = time.monotonic()
    results, summary, curves, hists = run_diagnose(spec)
    out = Path(spec.out_dir)
    write_csv(out / "results.csv", DIAGNOSE_RESULT_COLUMNS, results)
    write_csv(out / "summary.csv", DIAGNOSE_SUMMARY_COLUMNS, summary)
    write_csv(out / "entanglement_growth.csv", CURVE_COLUMNS, curves)
    write_csv(out / "spacing_histogram.csv", HIST_COLUMNS, hists)
    files = ["results.csv", "summary.csv", "entanglement_growth.csv",
             "spacing_histogram.csv", "haar_reference.json"]
    write_meta(out, "diagnose", spec, time.monotonic() - t0, files)
    return {"results": results, "summary": summary}


# ---------------------------------------------------------------------------
# task: memory, NARMA, contractivity
# ---------------------------------------------------------------------------

def _task_one(args):
    spec, point_index, realization = args
    n, d_over_n, p = spec.points()[point_index]
    depth = _depth_bricks(n, d_over_n)
    seed = child_seed(spec.master_seed, CMD_TASK, point_index, realization)
    rng = make_rng(seed)
    table = circuits.build_clifford_table()
    template = circuits.sample_template(n, depth, p, rng)
    cfg = reservoir.ReservoirConfig(
        n_qubits=n, depth=depth, ct_probability=p,
        template_seed=template.seed,
        steps=spec.steps, washout=spec.washout,
        ridge_lambda=spec.ridge_lambda, input_scale=spec.input_scale,
        feature_set=spec.feature_set,
    )
    base = {
        "n_qubits": n, "d_over_n": d_over_n, "depth": depth, "p": p,
        "realization": realization, "template_seed": template.seed,
    }
    rows = []
    curve = reservoir.memory_task(cfg, template, rng,
                                  max_tau=spec.max_tau, table=table)
    for tau, cap in zip(curve.taus, curve.capacities):
        rows.append(dict(base, task="memory", tau=int(tau),
                         capacity=float(cap), nmse=math.nan, eta=math.nan,
                         converged=None))
    narma = reservoir.narma_task(cfg, template, order=spec.narma_order,
                                 table=table)
    rows.append(dict(base, task="narma", tau=spec.narma_order,
                     capacity=narma.capacity, nmse=narma.nmse,
                     eta=math.nan, converged=None))
    mdim = 1 << len(cfg.memory_qubits)
    rho_a = np.zeros((mdim, mdim), dtype=complex)
    rho_a[0, 0] = 1.0
    rho_b = np.zeros((mdim, mdim), dtype=complex)
    rho_b[-1, -1] = 1.0
    probe_inputs = cfg.input_scale * rng.random(spec.probe_steps)
    conv = reservoir.convergence_rate(cfg, template, probe_inputs,
                                      rho_a, rho_b, table=table)
    rows.append(dict(base, task="convergence", tau=None,
                     capacity=math.nan, nmse=math.nan,
                     eta=conv.eta if math.isfinite(conv.eta) else math.nan,
                     converged=conv.converged))
    return point_index, realization, rows, float(curve.mean_capacity)


TASK_RESULT_COLUMNS = [
    "n_qubits", "d_over_n", "depth", "p", "realization", "template_seed",
    "task", "tau", "capacity", "nmse", "eta", "converged",
]

TASK_SUMMARY_COLUMNS = [
    "n_qubits", "d_over_n", "depth", "p", "realizations",
    "mean_memory_mean", "mean_memory_se",
    "c1_mean", "c1_se", "narma_capacity_mean", "narma_capacity_se",
    "narma_nmse_mean", "eta_mean", "eta_se",
]

MEMORY_CURVE_COLUMNS = [
    "n_qubits", "d_over_n", "p", "tau", "capacity_mean", "capacity_se",
]


def run_task(spec: SweepSpec):
    """Temporal-learning benchmarks over the grid.

    Returns (results rows, summary rows, memory-curve rows).
    """
    points = spec.points()
    items = [
        (spec, i, r)
        for i in range(len(points))
        for r in range(spec.realizations)
    ]
    outcomes = _run_pool(_task_one, items, spec.jobs)
    outcomes.sort(key=lambda t: (t[0], t[1]))

    results, summary, curve_rows = [], [], []
    for point_index, (n, d_over_n, p) in enumerate(points):
        group = [t for t in outcomes if t[0] == point_index]
        for _, _, rows, _ in group:
            results.extend(rows)
        flat = [row for _, _, rows, _ in group for row in rows]
        mem = [row for row in flat if row["task"] == "memory"]
        nar = [row for row in flat if row["task"] == "narma"]
        con = [row for row in flat if row["task"] == "convergence"]
        mean_mem, se_mem = _mean_se([t[3] for t in group])
        c1_mean, c1_se = _mean_se(
            [row["capacity"] for row in mem if row["tau"] == 1]
        )
        narma_mean, narma_se = _mean_se([row["capacity"] for row in nar])
        nmse_mean, _ = _mean_se([row["nmse"] for row in nar])
        eta_mean, eta_se = _mean_se([row["eta"] for row in con])
        summary.append({
            "n_qubits": n, "d_over_n": d_over_n,
            "depth": _depth_bricks(n, d_over_n), "p": p,
            "realizations": len(group),
            "mean_memory_mean": mean_mem, "mean_memory_se": se_mem,
            "c1_mean": c1_mean, "c1_se": c1_se,
            "narma_capacity_mean": narma_mean, "narma_capacity_se": narma_se,
            "narma_nmse_mean": nmse_mean,
            "eta_mean": eta_mean, "eta_se": eta_se,
        })
        taus = sorted({row["tau"] for row in mem})
        for tau in taus:
            mean, se = _mean_se(
                [row["capacity"] for row in mem if row["tau"] == tau]
            )
            curve_rows.append({
                "n_qubits": n, "d_over_n": d_over_n, "p": p, "tau": tau,
                "capacity_mean": mean, "capacity_se": se,
            })
    return results, summary, curve_rows


def cmd_task(spec: SweepSpec) -> dict:
    t0 = time.monotonic()
    results, summary, curves = run_task(spec)
    out = Path(spec.out_dir)
    write_csv(out / "results.csv", TASK_RESULT_COLUMNS, results)
    write_csv(out / "task_summary.csv", TASK_SUMMARY_COLUMNS, summary)
    write_csv(out / "memory_curve.csv", MEMORY_CURVE_COLUMNS, curves)
    files = ["results.csv", "task_summary.csv", "memory_curve.csv"]
    write_meta(out, "task", spec, time.monotonic() - t0, files)
    return {"results": results, "summary": summary}


# ---------------------------------------------------------------------------
# scaling: anti-flatness vs system size
# ---------------------------------------------------------------------------

def _scaling_one(args):
    spec, point_index, realization = args
    n, d_over_n, p = spec.points()[point_index]
    depth = _depth_bricks(n, d_over_n)
    rng = make_rng(child_seed(spec.master_seed, CMD_SCALING,
                              point_index, realization))
    table = circuits.build_clifford_table()
    template = circuits.sample_template(n, depth, p, rng)
    psi = StateVector.zero(n)
    circuits.apply_template(psi, template, table)
    f_value = magic.anti_flatness(psi, cut=n // 2)
    row = {
        "n_qubits": n, "d_over_n": d_over_n, "depth": depth, "p": p,
        "realization": realization, "template_seed": template.seed,
        "anti_flatness": f_value,
    }
    return point_index, realization, row


SCALING_RESULT_COLUMNS = [
    "n_qubits", "d_over_n", "depth", "p", "realization", "template_seed",
    "anti_flatness",
]

SCALING_SUMMARY_COLUMNS = [
    "n_qubits", "d_over_n", "depth", "p",
    "anti_flatness_mean", "anti_flatness_se", "haar_anti_flatness_mean",
]

SCALING_FIT_COLUMNS = [
    "d_over_n", "p", "alpha", "intercept", "r_squared", "n_sizes",
    "ensemble",
]


def run_scaling(spec: SweepSpec):
    """Mean anti-flatness vs N per p, with fitted scaling exponents.

    Returns (results rows, summary rows, fit rows).  The Haar ensemble
    contributes a baseline fit row per d/N value.
    """
    if len(spec.n_values) < 3:
        raise ValueError("scaling needs at least 3 system sizes")
    points = spec.points()
    items = [
        (spec, i, r)
        for i in range(len(points))
        for r in range(spec.realizations)
    ]
    outcomes = _run_pool(_scaling_one, items, spec.jobs)
    outcomes.sort(key=lambda t: (t[0], t[1]))
    results = [t[2] for t in outcomes]

    haar_means = {}
    for n in spec.n_values:
        rng = make_rng(child_seed(spec.master_seed, CMD_HAAR, n))
        haar_means[n] = float(np.mean(
            magic.haar_anti_flatness(n, spec.haar_samples, rng)
        ))

    summary, fits = [], []
    for d_over_n in spec.d_over_n_values:
        for p in spec.p_values:
            f_by_n = {}
            for n in spec.n_values:
                vals = [
                    row["anti_flatness"] for row in results
                    if row["n_qubits"] == n and row["p"] == p
                    and row["d_over_n"] == d_over_n
                ]
                mean, se = _mean_se(vals)
                f_by_n[n] = mean
                summary.append({
                    "n_qubits": n, "d_over_n": d_over_n,
                    "depth": _depth_bricks(n, d_over_n), "p": p,
                    "anti_flatness_mean": mean, "anti_flatness_se": se,
                    "haar_anti_flatness_mean": haar_means[n],
                })
            # means at the float-noise level (exactly flat spectra) would
            # fit a meaningless exponent; require a real signal
            fittable = all(v > 1e-12 for v in f_by_n.values())
            fit = magic.scrambling_exponent(
                list(f_by_n.keys()), list(f_by_n.values())
            ) if fittable else None
            fits.append({
                "d_over_n": d_over_n, "p": p,
                "alpha": fit.alpha if fit else math.nan,
                "intercept": fit.intercept if fit else math.nan,
                "r_squared": fit.r_squared if fit else math.nan,
                "n_sizes": len(f_by_n),
                "ensemble": "doped",
            })
        haar_fit = magic.scrambling_exponent(
            list(haar_means.keys()), list(haar_means.values())
        )
        fits.append({
            "d_over_n": d_over_n, "p": math.nan,
            "alpha": haar_fit.alpha, "intercept": haar_fit.intercept,
            "r_squared": haar_fit.r_squared, "n_sizes": len(haar_means),
            "ensemble": "haar",
        })
    return results, summary, fits


def cmd_scaling(spec: SweepSpec) -> dict:
    t0 = time.monotonic()
    results, summary, fits = run_scaling(spec)
    out = Path(spec.out_dir)
    write_csv(out / "results.csv", SCALING_RESULT_COLUMNS, results)
    write_csv(out / "scaling_summary.csv", SCALING_SUMMARY_COLUMNS, summary)
    write_csv(out / "scaling_fits.csv", SCALING_FIT_COLUMNS, fits)
    files = ["results.csv", "scaling_summary.csv", "scaling_fits.csv"]
    write_meta(out, "scaling", spec, time.monotonic() - t0, files)
    return {"results": results, "summary": summary, "fits": fits}


# ---------------------------------------------------------------------------
# haar-ref: reference table
# ---------------------------------------------------------------------------

HAAR_COLUMNS = [
    "n_qubits", "samples", "seed", "mean_mutual", "se_mutual",
    "mean_magic", "se_magic", "mean_anti_flatness", "se_anti_flatness",
]


def cmd_haar_ref(spec: SweepSpec) -> dict:
    t0 = time.monotonic()
    out = Path(spec.out_dir)
    rows = []
    for n in spec.n_values:
        if n > magic.PAULI_CAP_QUBITS:
            continue
        ref = magic.haar_reference(
            n, spec.haar_samples, spec.master_seed,
            cache_path=out / "haar_reference.json",
        )
        rows.append(asdict(ref))
    write_csv(out / "haar_reference.csv", HAAR_COLUMNS, rows)
    write_meta(out, "haar-ref", spec, time.monotonic() - t0,
               ["haar_reference.csv", "haar_reference.json"])
    return {"rows": rows}


# ---------------------------------------------------------------------------
# crossover locators
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CrossoverEstimates:
    """Heuristic crossover probabilities from a diagnose summary."""

    p_star: float
    p_star_reliable: bool
    p_sharp: float
    p_sharp_reliable: bool
    method: str = "HEURISTIC"


def locate_crossovers(summary_rows: list) -> CrossoverEstimates:
    """Operational crossover markers on a p grid at fixed (N, d/N).

    p* is the smallest grid p whose mean spacing ratio falls below the
    midpoint of the chaotic and integrable reference values with a
    monotone (within tolerance) decline beyond; p# is the smallest p
    past the relative-gap minimum where the gap exceeds twice its
    plateau mean (plateau = lowest quartile of the gap curve).  Both are
    explicitly heuristic; non-monotone inputs set the reliability flags
    to False.
    """
    rows = sorted(summary_rows, key=lambda row: row["p"])
    if len({(row["n_qubits"], row["d_over_n"]) for row in rows}) != 1:
        raise ValueError("crossover locator needs a single (N, d/N) slice")
    p_grid = np.array([row["p"] for row in rows], dtype=float)
    mean_r = np.array(
        [row.get("pooled_mean_r", row.get("mean_r_mean", math.nan))
         for row in rows], dtype=float,
    )
    delta_i = np.array([row["delta_i_mean"] for row in rows], dtype=float)

    # p*: spacing-ratio decline below the midpoint
    p_star, p_star_reliable = math.nan, False
    valid = ~np.isnan(mean_r)
    below = valid & (mean_r < R_MIDPOINT)
    for k in np.nonzero(below)[0]:
        tail = mean_r[valid & (p_grid >= p_grid[k])]
        if np.all(np.diff(tail) <= MONOTONE_TOL):
            p_star, p_star_reliable = float(p_grid[k]), True
            break
    if math.isnan(p_star) and below.any():
        p_star = float(p_grid[np.nonzero(below)[0][0]])

    # p#: relative-gap upturn past its plateau
    p_sharp, p_sharp_reliable = math.nan, False
    dvalid = ~np.isnan(delta_i)
    if dvalid.sum() >= 4:
        dvals = delta_i[dvalid]
        dps = p_grid[dvalid]
        k_plateau = max(2, dvals.size // 4)
        plateau = float(np.mean(np.sort(dvals)[:k_plateau]))
        argmin = int(np.argmin(dvals))
        threshold = PLATEAU_FACTOR * plateau
        for k in range(argmin + 1, dvals.size):
            if dvals[k] > threshold:
                p_sharp = float(dps[k])
                p_sharp_reliable = argmin < dvals.size - 1
                break
    return CrossoverEstimates(
        p_star=p_star, p_star_reliable=p_star_reliable,
        p_sharp=p_sharp, p_sharp_reliable=p_sharp_reliable,
    )


CROSSOVER_COLUMNS = [
    "n_qubits", "d_over_n", "p_sharp", "p_sharp_reliable",
    "p_star", "p_star_reliable", "method",
]


def cmd_crossovers(summary_csv: str | Path, out_dir: str | Path) -> CrossoverEstimates:
    """Locate crossovers from a written diagnose summary table."""
    rows = []
    with open(summary_csv, newline="") as fh:
        for record in csv.DictReader(fh):
            rows.append({
                "n_qubits": int(record["n_qubits"]),
                "d_over_n": float(record["d_over_n"]),
                "p": float(record["p"]),
                "pooled_mean_r": float(record["pooled_mean_r"])
                if record["pooled_mean_r"] else math.nan,
                "delta_i_mean": float(record["delta_i_mean"])
                if record["delta_i_mean"] else math.nan,
            })
        estimate = locate_crossovers(rows)
    out = Path(out_dir)
    write_csv(out / "crossovers.csv", CROSSOVER_COLUMNS, [{
        "n_qubits": rows[0]["n_qubits"],
        "d_over_n": rows[0]["d_over_n"],
        "p_sharp": estimate.p_sharp,
        "p_sharp_reliable": estimate.p_sharp_reliable,
        "p_star": estimate.p_star,
        "p_star_reliable": estimate.p_star_reliable,
        "method": estimate.method,
    }])
    return estimate
