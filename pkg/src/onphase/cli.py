"""Command-line interface: simulate, sweep, analyze, report."""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from .energy import EnergyConvention
from .errors import OnphaseError
from .ingest import load_embedding_table
from .lattice import run_simulation
from .lattice.observables import (
    blocked_standard_error,
    fluctuation_specific_heat,
    susceptibility,
)
from .lattice.sampler import chain_rng
from .runs import SweepConfig, save_run
from .sweep import analyze_run, load_report, render_report, run_sweep, save_report

ANALYSIS_FILENAME = "analysis.json"


def _cmd_simulate(args) -> int:
    temps = [float(t) for t in args.temps.split(",") if t.strip()]
    rows = []
    volume = args.side**args.dim
    for index, temp in enumerate(temps):
        # chain seeds derive from (seed, index) so scheduling cannot matter
        series = run_simulation(
            d=args.dim,
            side=args.side,
            N=args.ncomp,
            T=temp,
            thermalization_sweeps=args.therm,
            measurement_sweeps=args.sweeps,
            sampler=args.sampler,
            seed=int(chain_rng(args.seed, index).integers(2**63)),
        )
        energies = series.energies / volume
        rows.append(
            {
                "temperature": temp,
                "mean_energy_per_site": float(energies.mean()),
                "stderr": blocked_standard_error(energies),
                "specific_heat": fluctuation_specific_heat(series, volume),
                "susceptibility": susceptibility(series, volume),
            }
        )
        print(
            f"T={temp:g}: E/site={rows[-1]['mean_energy_per_site']:+.5f} "
            f"C={rows[-1]['specific_heat']:.4f} chi={rows[-1]['susceptibility']:.4f}"
        )
    out = Path(args.out)
    out.parent.mkdir(parents=True, exist_ok=True)
    with open(out, "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=list(rows[0].keys()))
        writer.writeheader()
        writer.writerows(rows)
    print(f"wrote {out}")
    return 0


def _cmd_sweep(args) -> int:
    config = SweepConfig.from_dict(json.loads(Path(args.config).read_text()))
    manifest = run_sweep(config)
    run_dir = save_run(manifest, args.out)
    errors = [r for r in manifest.records if r.status == "error"]
    print(
        f"run saved to {run_dir}: {len(manifest.records) - len(errors)} completed, "
        f"{len(errors)} failed cells"
    )
    for record in errors:
        print(f"  failed {record.request_id}: {record.error}")
    return 1 if errors else 0


def _conv_from_args(args) -> EnergyConvention:
    return EnergyConvention(
        sign=args.convention,
        diagonal=args.diagonal,
        row_normalize=not args.no_row_normalize,
    )


def _cmd_analyze(args) -> int:
    table = load_embedding_table(args.embeddings)
    report = analyze_run(
        args.run,
        table,
        conv=_conv_from_args(args),
        tail_fraction=args.tail_fraction,
        gap_tolerance=args.gap_tolerance,
    )
    out_path = Path(args.run) / ANALYSIS_FILENAME
    save_report(report, out_path)
    print(f"analysis saved to {out_path}")
    if report.fit is not None:
        print(
            f"T_c={report.fit.T_c:.4f} alpha'={report.fit.alpha_prime:.4f} "
            f"d_internal={report.fit.d_internal:.3f}"
        )
    if report.verdict is not None:
        print(f"gap={report.gap:+.4f} verdict={report.verdict.value}")
    if report.intrinsic_dimension_at_T1 is not None:
        print(f"intrinsic dimension near T=1: {report.intrinsic_dimension_at_T1:.3f}")
    for warning in report.warnings:
        print(f"warning: {warning}")
    return 0


def _cmd_report(args) -> int:
    analysis_path = Path(args.run) / ANALYSIS_FILENAME
    if not analysis_path.exists():
        print(f"{analysis_path} not found; run `onphase analyze` first", file=sys.stderr)
        return 1
    report = load_report(analysis_path)
    written = render_report(report, args.out)
    for path in written:
        print(f"wrote {path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="onphase",
        description="Energy-vs-temperature phase analysis for generated text, "
        "with a lattice Monte Carlo reference simulator.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="lattice Monte Carlo over a temperature grid")
    sim.add_argument("--dim", type=int, required=True)
    sim.add_argument("--side", type=int, required=True)
    sim.add_argument("--ncomp", type=int, default=1)
    sim.add_argument("--temps", type=str, required=True, help="comma-separated temperatures")
    sim.add_argument("--sweeps", type=int, default=5000, help="measurement sweeps per T")
    sim.add_argument("--therm", type=int, default=1000, help="thermalization sweeps per T")
    sim.add_argument("--sampler", choices=("metropolis", "wolff"), default="metropolis")
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--out", type=str, required=True, help="output CSV path")
    sim.set_defaults(func=_cmd_simulate)

    swp = sub.add_parser("sweep", help="drive an endpoint over the temperature grid")
    swp.add_argument("--config", type=str, required=True, help="sweep config JSON")
    swp.add_argument("--out", type=str, required=True, help="run directory to create")
    swp.set_defaults(func=_cmd_sweep)

    ana = sub.add_parser("analyze", help="analyze a persisted run directory")
    ana.add_argument("--run", type=str, required=True)
    ana.add_argument("--embeddings", type=str, required=True, help="ONEM table file")
    ana.add_argument("--convention", choices=("hamiltonian", "as-written"), default="hamiltonian")
    ana.add_argument("--diagonal", choices=("exclude", "include"), default="exclude")
    ana.add_argument("--no-row-normalize", action="store_true")
    ana.add_argument("--tail-fraction", type=float, default=0.2)
    ana.add_argument("--gap-tolerance", type=float, default=0.0)
    ana.set_defaults(func=_cmd_analyze)

    rep = sub.add_parser("report", help="render analysis artifacts to files")
    rep.add_argument("--run", type=str, required=True)
    rep.add_argument("--out", type=str, required=True)
    rep.set_defaults(func=_cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except OnphaseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
