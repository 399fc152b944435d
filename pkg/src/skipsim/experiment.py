"""Sweep orchestration: generated workloads crossed with policies and energy modes.

Every cell of a sweep is identified by (n_tasks, run index); its seed is
derived injectively from the base seed, so all policies and energy modes of
one cell consume the identical task set and identical per-instance execution
draws. Cells whose mandatory load no speed level can sustain are skipped for
the voltage-scaling modes (the baseline rows still appear).
"""

import warnings
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from skipsim.config import Settings
from skipsim.energy import account, nominal_speed, normalized_energy
from skipsim.engine import SimOptions, Trace, run_simulation
from skipsim.errors import HyperperiodAlignmentWarning, InfeasibleNominalSpeedError
from skipsim.metrics import ResultRow, success_ratios
from skipsim.policies import Policy
from skipsim.rational import Rat, rat
from skipsim.seeds import derive_seed
from skipsim.taskmodel import ColoringMode, TaskSet
from skipsim.workload import GenConfig, generate_task_set

ENERGY_MODES = ("none", "dvs", "dvs+dpd")


def mode_flags(mode: str) -> Tuple[bool, bool]:
    if mode == "none":
        return False, False
    if mode == "dvs":
        return True, False
    if mode == "dvs+dpd":
        return True, True
    raise ValueError(f"unknown energy mode {mode!r}")


@dataclass(frozen=True)
class ExperimentPlan:
    n_min: int = 2
    n_max: int = 10
    runs_per_point: int = 10
    policies: Tuple[Policy, ...] = (Policy.RTO, Policy.BWP, Policy.RLP)
    modes: Tuple[str, ...] = ("none",)
    base_seed: int = 0
    coloring: ColoringMode = ColoringMode.AUTOMATON


def cell_seed(base_seed: int, n: int, run: int) -> int:
    """Injective per-cell seed shared by every policy and mode of the cell."""
    return derive_seed(base_seed, "cell", n, run)


def sweep_horizon(ts: TaskSet, cap: int) -> int:
    """One hyperperiod, capped: long hyperperiods are truncated to the cap."""
    return ts.hyperperiod if ts.hyperperiod <= cap else cap


@dataclass
class SweepResult:
    rows: List[ResultRow]
    skipped_cells: List[Tuple[int, int]]  # (n, run) with no feasible nominal speed


def _row(n, policy, mode, seed, ts, metrics, e_total, norm) -> ResultRow:
    dvs, dpd = mode_flags(mode)
    totals = metrics.totals()
    return ResultRow(
        n_tasks=n,
        policy=policy.value,
        dvs=dvs,
        dpd=dpd,
        seed=seed,
        u_tot=ts.total_utilization,
        avg_success_ratio=metrics.avg_success_ratio,
        aggregate_success_ratio=metrics.aggregate_success_ratio,
        red_hit=totals.red_hit,
        red_miss=totals.red_miss,
        blue_hit=totals.blue_hit,
        blue_miss=totals.blue_miss,
        e_total=e_total,
        normalized_energy=norm,
    )


def run_sweep(plan: ExperimentPlan, settings: Optional[Settings] = None) -> SweepResult:
    """Execute the full plan; deterministic in the plan and settings."""
    if settings is None:
        settings = Settings()
    cpu = settings.processor
    rows: List[ResultRow] = []
    skipped: List[Tuple[int, int]] = []
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HyperperiodAlignmentWarning)
        for n in range(plan.n_min, plan.n_max + 1):
            for run in range(plan.runs_per_point):
                seed = cell_seed(plan.base_seed, n, run)
                ts = generate_task_set(
                    GenConfig(
                        n_tasks=n,
                        period_range=settings.period_range,
                        wcet_range=settings.wcet_range,
                        skip_factor=settings.skip_factor,
                        seed=seed,
                        multiples_rule=settings.multiples_rule,
                        bcet_fraction=settings.bcet_fraction,
                    )
                )
                horizon = sweep_horizon(ts, settings.horizon_cap)
                baselines: Dict[Policy, Trace] = {}
                for policy in plan.policies:
                    baselines[policy] = run_simulation(
                        ts,
                        policy,
                        cpu,
                        SimOptions(
                            seed=seed, horizon=horizon, coloring=plan.coloring
                        ),
                    )
                feasible = True
                if any(m != "none" for m in plan.modes):
                    try:
                        nominal_speed(ts, cpu, horizon)
                    except InfeasibleNominalSpeedError:
                        feasible = False
                        skipped.append((n, run))
                for mode in plan.modes:
                    dvs, dpd = mode_flags(mode)
                    for policy in plan.policies:
                        if not dvs and not dpd:
                            trace = baselines[policy]
                        elif feasible:
                            trace = run_simulation(
                                ts,
                                policy,
                                cpu,
                                SimOptions(
                                    seed=seed,
                                    horizon=horizon,
                                    coloring=plan.coloring,
                                    dvs=dvs,
                                    dpd=dpd,
                                ),
                            )
                        else:
                            continue
                        report = account(trace, cpu)
                        base_report = account(baselines[policy], cpu)
                        norm = (
                            1
                            if trace is baselines[policy]
                            else normalized_energy(report, base_report)
                        )
                        metrics = success_ratios(trace, ts)
                        rows.append(
                            _row(n, policy, mode, seed, ts, metrics, report.e_total, norm)
                        )
    return SweepResult(rows=rows, skipped_cells=skipped)


@dataclass(frozen=True)
class SummaryRow:
    n_tasks: int
    policy: str
    mode: str
    cells: int
    mean_avg_success_ratio: Union[int, Rat]
    mean_aggregate_success_ratio: Union[int, Rat]
    mean_normalized_energy: Union[int, Rat]


def _mean(values):
    if not values:
        return 0
    total = sum(values, 0)
    if isinstance(total, int):
        return rat(total, len(values))
    return total / len(values)


def summarize(result: SweepResult, plan: ExperimentPlan) -> List[SummaryRow]:
    """Per-point averages in fixed (n, policy, mode) order."""
    out = []
    for n in range(plan.n_min, plan.n_max + 1):
        for policy in plan.policies:
            for mode in plan.modes:
                dvs, dpd = mode_flags(mode)
                cells = [
                    r
                    for r in result.rows
                    if r.n_tasks == n
                    and r.policy == policy.value
                    and r.dvs == dvs
                    and r.dpd == dpd
                ]
                out.append(
                    SummaryRow(
                        n_tasks=n,
                        policy=policy.value,
                        mode=mode,
                        cells=len(cells),
                        mean_avg_success_ratio=_mean(
                            [r.avg_success_ratio for r in cells]
                        ),
                        mean_aggregate_success_ratio=_mean(
                            [r.aggregate_success_ratio for r in cells]
                        ),
                        mean_normalized_energy=_mean(
                            [r.normalized_energy for r in cells]
                        ),
                    )
                )
    return out
