"""Command line entry points for sweeps.

Subcommands mirror the sweep runners: ``diagnose`` (entanglement and
magic diagnostics), ``task`` (memory/NARMA benchmarks), ``scaling``
(anti-flatness vs system size), ``haar-ref`` (reference table), and
``crossovers`` (heuristic locators on a written diagnose summary).
Every run writes results.csv plus aggregate companions and a meta.json
into --out; --smoke shrinks the grid to a minutes-scale check.
"""

from __future__ import annotations

import argparse
import sys

from . import sweeps

_COMMAND_DEFAULTS = {
    "diagnose": dict(n_values=(10,), realizations=50),
    "task": dict(n_values=(10,), realizations=50,
                 p_values=(0.0, 0.02, 0.05, 0.1, 0.2, 0.3, 0.5, 0.7, 0.9)),
    "scaling": dict(n_values=(6, 8, 10, 12), realizations=50,
                    p_values=(0.0, 0.1, 0.3, 0.5, 1.0)),
    "haar-ref": dict(n_values=(4, 6, 8, 10, 12)),
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pqrc",
        description="Doped-Clifford reservoir sweeps: diagnostics, "
                    "temporal-learning tasks, and scaling fits.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("diagnose", "entanglement spectra and magic over a (N, d/N, p) grid"),
        ("task", "delay-memory and NARMA capacities over the grid"),
        ("scaling", "anti-flatness scaling exponents vs system size"),
        ("haar-ref", "Haar reference means for magic diagnostics"),
        ("crossovers", "heuristic crossover locators from a diagnose summary"),
    ]:
        cmd = sub.add_parser(name, help=help_text)
        cmd.add_argument("--config", type=str, default=None,
                         help="INI file overriding grid and knobs")
        cmd.add_argument("--seed", type=int, default=None,
                         help="master seed (overrides config)")
        cmd.add_argument("--jobs", type=int, default=1,
                         help="worker process count")
        cmd.add_argument("--out", type=str, default=None,
                         help="output directory (overrides config)")
        cmd.add_argument("--smoke", action="store_true",
                         help="shrink the grid to a fast smoke run")
        if name == "crossovers":
            cmd.add_argument("--table", type=str, required=True,
                             help="diagnose summary.csv to scan")
    return parser


def resolve_spec(args: argparse.Namespace) -> sweeps.SweepSpec:
    """Defaults <- config file <- command line flags, in that order."""
    from dataclasses import replace

    spec = sweeps.SweepSpec(**_COMMAND_DEFAULTS.get(args.command, {}))
    if args.config:
        spec = sweeps.load_config(args.config, base=spec)
    overrides = {}
    if args.seed is not None:
        overrides["master_seed"] = args.seed
    if args.out is not None:
        overrides["out_dir"] = args.out
    overrides["jobs"] = args.jobs
    spec = replace(spec, **overrides)
    if args.smoke:
        spec = sweeps.smoke_spec(spec, args.command)
    return spec


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "crossovers":
        spec = resolve_spec(args)
        estimate = sweeps.cmd_crossovers(args.table, spec.out_dir)
        print(f"p_sharp={estimate.p_sharp} (reliable={estimate.p_sharp_reliable}) "
              f"p_star={estimate.p_star} (reliable={estimate.p_star_reliable}) "
              f"[{estimate.method}]")
        return 0
    spec = resolve_spec(args)
    runner = {
        "diagnose": sweeps.cmd_diagnose,
        "task": sweeps.cmd_task,
        "scaling": sweeps.cmd_scaling,
        "haar-ref": sweeps.cmd_haar_ref,
    }[args.command]
    runner(spec)
    print(f"wrote {spec.out_dir}/ (seed={spec.master_seed}, "
          f"jobs={spec.jobs})")
    return 0


if __name__ == "__main__":
    sys.exit(main())
