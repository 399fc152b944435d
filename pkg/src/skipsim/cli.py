"""Command-line interface: single simulations and experiment sweeps.

Exit codes: 0 success, 2 usage error, 3 no feasible nominal speed,
4 I/O error.
"""

import argparse
import os
import sys
import warnings
from typing import List, Optional

from skipsim import __version__
from skipsim.config import (
    CONFIG_ENV_VAR,
    Settings,
    load_settings,
    load_taskset,
)
from skipsim.energy import account, normalized_energy
from skipsim.engine import SimOptions, run_simulation
from skipsim.errors import (
    ConfigError,
    HyperperiodAlignmentWarning,
    InfeasibleNominalSpeedError,
    SkipsimError,
)
from skipsim.experiment import (
    ENERGY_MODES,
    ExperimentPlan,
    SummaryRow,
    run_sweep,
    summarize,
    sweep_horizon,
)
from skipsim.metrics import export, success_ratios
from skipsim.policies import Policy
from skipsim.rational import format_decimal, parse_rat, rat_str
from skipsim.taskmodel import ColoringMode
from skipsim.traceio import write_trace
from skipsim.workload import GenConfig, format_taskset, generate_task_set

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_IO = 4


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skipsim",
        description="Preemptive scheduling simulator for skippable periodic tasks",
    )
    parser.add_argument("--version", action="version", version=f"skipsim {__version__}")
    parser.add_argument(
        "--config",
        help=f"JSON config file (default: ${CONFIG_ENV_VAR} if set)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one simulation")
    src = sim.add_mutually_exclusive_group(required=True)
    src.add_argument("--taskset", help="task-set file (period wcet skip_factor per line)")
    src.add_argument("--n", type=int, help="generate a random set with N tasks")
    sim.add_argument("--seed", type=int, default=0, help="seed for generation and draws")
    sim.add_argument(
        "--policy",
        choices=[p.value for p in Policy],
        default=Policy.RTO.value,
    )
    sim.add_argument("--dvs", action="store_true", help="enable voltage scaling")
    sim.add_argument("--dpd", action="store_true", help="enable dynamic power-down")
    sim.add_argument(
        "--coloring",
        choices=[m.value for m in ColoringMode],
        default=ColoringMode.AUTOMATON.value,
    )
    sim.add_argument("--horizon", type=int, help="time units (default: one hyperperiod)")
    sim.add_argument("--trace", help="write the execution trace to this file")
    sim.add_argument("--dump-taskset", help="write the task set (text format) to this file")
    sim.add_argument("--bcet-fraction", help="lower bound of actual/worst-case time, e.g. 1/2")
    sim.add_argument(
        "--bwp-literal",
        action="store_true",
        help="abort an executing blue the instant a red is released",
    )
    sim.add_argument(
        "--blue-speed",
        choices=["nominal", "max", "stretch"],
        default="nominal",
        help="dispatch speed of blue jobs under voltage scaling",
    )
    sim.add_argument("--edl-debug", action="store_true", help="dump latest-start schedules")

    sw = sub.add_parser("sweep", help="run an experiment sweep")
    sw.add_argument("--n-min", type=int, default=2)
    sw.add_argument("--n-max", type=int, default=10)
    sw.add_argument("--runs", type=int, default=10, help="runs per point")
    sw.add_argument(
        "--policies",
        default="rto,bwp,rlp",
        help="comma-separated subset of rto,bwp,rlp",
    )
    sw.add_argument(
        "--modes",
        default="none",
        help="comma-separated subset of none,dvs,dvs+dpd",
    )
    sw.add_argument("--seed", type=int, default=0, help="base seed")
    sw.add_argument(
        "--coloring",
        choices=[m.value for m in ColoringMode],
        default=ColoringMode.AUTOMATON.value,
    )
    sw.add_argument("--horizon-cap", type=int, help="truncate hyperperiods beyond this")
    sw.add_argument("--out", default=".", help="output directory")
    sw.add_argument("--format", choices=["csv", "json"], default="csv")
    sw.add_argument(
        "--gnuplot",
        action="store_true",
        help="also write per-figure data files (ratio vs n, energy vs n)",
    )
    return parser


def _simulate(args, settings: Settings) -> int:
    bcet = parse_rat(args.bcet_fraction) if args.bcet_fraction else settings.bcet_fraction
    if args.taskset:
        ts = load_taskset(args.taskset, bcet_fraction=bcet)
    else:
        ts = generate_task_set(
            GenConfig(
                n_tasks=args.n,
                period_range=settings.period_range,
                wcet_range=settings.wcet_range,
                skip_factor=settings.skip_factor,
                seed=args.seed,
                multiples_rule=settings.multiples_rule,
                bcet_fraction=bcet,
            )
        )
    if args.dump_taskset:
        with open(args.dump_taskset, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(format_taskset(ts))
    policy = Policy(args.policy)
    horizon = args.horizon if args.horizon is not None else sweep_horizon(ts, settings.horizon_cap)
    opts = SimOptions(
        dvs=args.dvs,
        dpd=args.dpd,
        coloring=ColoringMode(args.coloring),
        seed=args.seed,
        horizon=horizon,
        bwp_abort_literal=args.bwp_literal,
        edl_debug=args.edl_debug,
        blue_dvs_speed=args.blue_speed,
    )
    cpu = settings.processor
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HyperperiodAlignmentWarning)
        trace = run_simulation(ts, policy, cpu, opts)
        metrics = success_ratios(trace, ts)
        report = account(trace, cpu)
        lines = [
            f"policy {policy.value}",
            f"horizon {horizon}",
            f"u_tot {format_decimal(ts.total_utilization)} ({rat_str(ts.total_utilization)})",
            f"instances {sum(c.instances for c in metrics.per_task.values())}"
            f" hits {sum(c.hits for c in metrics.per_task.values())}",
            "aggregate_success_ratio "
            f"{format_decimal(metrics.aggregate_success_ratio)} ({rat_str(metrics.aggregate_success_ratio)})",
            "avg_success_ratio "
            f"{format_decimal(metrics.avg_success_ratio)} ({rat_str(metrics.avg_success_ratio)})",
            f"e_total {format_decimal(report.e_total)} ({rat_str(report.e_total)})",
            f"shutdowns {trace.shutdown_count}",
        ]
        if args.dvs or args.dpd:
            base = run_simulation(
                ts,
                policy,
                cpu,
                SimOptions(coloring=ColoringMode(args.coloring), seed=args.seed, horizon=horizon),
            )
            norm = normalized_energy(report, account(base, cpu))
            lines.append(f"normalized_energy {format_decimal(norm)} ({rat_str(norm)})")
    print("\n".join(lines))
    if args.trace:
        write_trace(trace, args.trace)
    return EXIT_OK


def _summary_lines(summaries: List[SummaryRow]) -> str:
    header = (
        "n_tasks,policy,mode,cells,mean_avg_success_ratio,"
        "mean_aggregate_success_ratio,mean_normalized_energy,"
        "mean_avg_success_ratio_exact,mean_aggregate_success_ratio_exact,"
        "mean_normalized_energy_exact"
    )
    lines = [header]
    for s in summaries:
        lines.append(
            ",".join(
                [
                    str(s.n_tasks),
                    s.policy,
                    s.mode,
                    str(s.cells),
                    format_decimal(s.mean_avg_success_ratio),
                    format_decimal(s.mean_aggregate_success_ratio),
                    format_decimal(s.mean_normalized_energy),
                    rat_str(s.mean_avg_success_ratio),
                    rat_str(s.mean_aggregate_success_ratio),
                    rat_str(s.mean_normalized_energy),
                ]
            )
        )
    return "\n".join(lines) + "\n"


def _gnuplot_files(summaries: List[SummaryRow], plan: ExperimentPlan, out_dir: str):
    policies = [p.value for p in plan.policies]

    def table(selector, value_of):
        lines = ["# n " + " ".join(policies)]
        for n in range(plan.n_min, plan.n_max + 1):
            cells = [str(n)]
            for pol in policies:
                match = [s for s in summaries if s.n_tasks == n and s.policy == pol and selector(s)]
                cells.append(format_decimal(value_of(match[0])) if match else "nan")
            lines.append(" ".join(cells))
        return "\n".join(lines) + "\n"

    ratio_mode = "none" if "none" in plan.modes else plan.modes[0]
    path = os.path.join(out_dir, "fig_success_ratio.dat")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(table(lambda s: s.mode == ratio_mode, lambda s: s.mean_avg_success_ratio))
    energy_modes = [m for m in plan.modes if m != "none"]
    if energy_modes:
        path = os.path.join(out_dir, "fig_energy.dat")
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(
                table(
                    lambda s: s.mode == energy_modes[-1],
                    lambda s: s.mean_normalized_energy,
                )
            )


def _sweep(args, settings: Settings) -> int:
    policies = []
    for name in args.policies.split(","):
        name = name.strip()
        if name:
            policies.append(Policy(name))
    modes = []
    for name in args.modes.split(","):
        name = name.strip()
        if name:
            if name not in ENERGY_MODES:
                raise ConfigError(f"unknown energy mode {name!r}")
            modes.append(name)
    if args.horizon_cap is not None:
        settings.horizon_cap = args.horizon_cap
    plan = ExperimentPlan(
        n_min=args.n_min,
        n_max=args.n_max,
        runs_per_point=args.runs,
        policies=tuple(policies),
        modes=tuple(modes),
        base_seed=args.seed,
        coloring=ColoringMode(args.coloring),
    )
    result = run_sweep(plan, settings)
    os.makedirs(args.out, exist_ok=True)
    results_path = os.path.join(args.out, f"results.{args.format}")
    export(result.rows, args.format, results_path)
    summaries = summarize(result, plan)
    summary_path = os.path.join(args.out, "summary.csv")
    with open(summary_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_summary_lines(summaries))
    if args.gnuplot:
        _gnuplot_files(summaries, plan, args.out)
    print(f"rows {len(result.rows)}")
    print(f"skipped_infeasible_cells {len(result.skipped_cells)}")
    print(f"results {results_path}")
    print(f"summary {summary_path}")
    return EXIT_OK


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        settings = load_settings(args.config)
        if args.command == "simulate":
            return _simulate(args, settings)
        return _sweep(args, settings)
    except InfeasibleNominalSpeedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ConfigError, SkipsimError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
