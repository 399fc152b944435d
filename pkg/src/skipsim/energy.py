"""Processor power model, speed selection, power-down decisions, and accounting.

The processor runs at one of a discrete set of speed levels in (0, 1] while
executing and consumes stand-by power whenever it is on. Two techniques cut
energy: inter-task voltage scaling (a static nominal speed plus dynamic
reclamation of earliness) and dynamic power-down of idle gaps longer than
the break-even time.
"""

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Sequence, Tuple, Union

from skipsim.errors import (
    InfeasibleNominalSpeedError,
    MalformedTraceError,
    UnknownLevelError,
    ZeroBaselineError,
)
from skipsim.rational import Rat, exact_div, rat

Number = Union[int, Rat]


@dataclass(frozen=True)
class PhysicalTables:
    """Optional physical voltage/frequency description of the levels."""

    c_ef: Number
    k_const: Number
    v_threshold: Number
    table: tuple  # ordered (level, v_dd, f) triples

    def entry(self, level):
        for s, v_dd, f in self.table:
            if s == level:
                return v_dd, f
        raise UnknownLevelError(f"no physical entry for level {level!r}")


@dataclass(frozen=True)
class ProcessorModel:
    """Discrete speed levels plus stand-by and shutdown parameters.

    Levels are strictly ascending and end at 1 (full speed). In the default
    normalized mode the dynamic power at speed ``s`` is ``s**3`` so that full
    speed dissipates unit power; a physical mode computes power from supplied
    voltage/frequency tables instead.
    """

    levels: tuple = (rat(1, 4), rat(1, 2), rat(3, 4), 1)
    p_standby: Number = rat(1, 20)
    e_shutdown: Number = rat(2, 5)
    t_overhead: Number = rat(1, 2)
    physical: Optional[PhysicalTables] = None

    def __post_init__(self):
        if not self.levels or self.levels[-1] != 1:
            raise UnknownLevelError("levels must be ascending and end at 1")
        prev = 0
        for s in self.levels:
            if not (0 < s <= 1) or s <= prev:
                raise UnknownLevelError("levels must be strictly ascending in (0, 1]")
            prev = s
        if self.p_standby <= 0:
            raise UnknownLevelError("p_standby must be positive")

    @property
    def s_min(self) -> Number:
        return self.levels[0]

    @property
    def break_even(self) -> Number:
        """Idle length below which shutting down cannot pay off."""
        return exact_div(self.e_shutdown, self.p_standby)

    def level_at_least(self, value) -> Optional[Number]:
        """Smallest configured level >= value, or None if value > 1."""
        for s in self.levels:
            if s >= value:
                return s
        return None


def frequency(k_const, v_dd, v_threshold):
    """Clock frequency reachable at a supply voltage."""
    dv = v_dd - v_threshold
    return k_const * dv * dv / v_dd


def power(cpu: ProcessorModel, s) -> Number:
    """Dynamic power at speed level ``s``.

    Normalized mode: ``s**3``. Physical mode: ``c_ef * v_dd(s)**2 * f(s)``
    from the configured tables. Execution-mode total power additionally
    includes ``p_standby``.
    """
    if s not in cpu.levels:
        raise UnknownLevelError(f"speed {s!r} is not a configured level")
    if cpu.physical is not None:
        v_dd, f = cpu.physical.entry(s)
        return cpu.physical.c_ef * v_dd * v_dd * f
    return s * s * s


@dataclass(frozen=True)
class EnergyReport:
    """Integrated energy of one trace, with its time decomposition."""

    e_dynamic: Number
    e_standby: Number
    e_shutdown_total: Number
    t_exec: Number
    t_idle_on: Number
    t_off: Number
    t_overhead_total: Number
    shutdown_count: int
    cycles: Optional[dict] = None  # (task, index) -> cycles, physical mode only

    @property
    def e_total(self) -> Number:
        return self.e_dynamic + self.e_standby + self.e_shutdown_total


def dpd_decide(idle_start, next_event, cpu: ProcessorModel) -> bool:
    """True to power off for the idle gap [idle_start, next_event).

    The gap must cover both the break-even time (so the saved stand-by energy
    repays the shutdown energy) and the wall-time cost of the
    shutdown/wake-up cycle itself.
    """
    gap = next_event - idle_start
    threshold = cpu.break_even
    if cpu.t_overhead > threshold:
        threshold = cpu.t_overhead
    return gap >= threshold


def _start_of(sl):
    # int/Rat mix: comparisons are defined across both, so a direct key works
    return sl[0]


class CanonicalSchedule:
    """Static reference schedule used by dynamic reclamation.

    Holds the red-only earliest-deadline schedule at the nominal speed with
    worst-case workloads: per-job allocated intervals over the horizon. A
    dispatched job may slow down into the canonical time of already-retired
    earlier-deadline jobs, but never past its own canonical finish.
    """

    def __init__(self, speed, slices: Sequence[Tuple[Number, Number, Tuple[int, int]]]):
        self.speed = speed
        self.slices = sorted(slices, key=_start_of)
        self.own_end: Dict[Tuple[int, int], Number] = {}
        for start, end, key in self.slices:
            cur = self.own_end.get(key)
            if cur is None or end > cur:
                self.own_end[key] = end

    def allocation_end(self, key) -> Optional[Number]:
        return self.own_end.get(key)

    def busy_other_unretired(self, key, lo, hi, retired: Callable[[Tuple[int, int]], bool]) -> Number:
        """Canonical time in [lo, hi) still owed to other, unretired jobs."""
        total = 0
        for start, end, skey in self.slices:
            if start >= hi:
                break
            if end <= lo or skey == key:
                continue
            if retired(skey):
                continue
            s = start if start > lo else lo
            e = end if end < hi else hi
            if e > s:
                total = total + (e - s)
        return total


def dra_speed(
    alpha: CanonicalSchedule,
    job,
    now,
    cpu: ProcessorModel,
    retired: Optional[Callable[[Tuple[int, int]], bool]] = None,
):
    """Dispatch speed for ``job`` at time ``now`` under dynamic reclamation.

    The time available to the job is the span up to its own canonical finish
    minus canonical time still owed to other unretired jobs inside that span;
    earliness of completed or skipped predecessors thereby accrues to the
    dispatched job. The chosen level never lets a worst-case execution finish
    after the canonical finish. When no slack is provable (no canonical
    allocation, span elapsed, or over-unit demand) the nominal speed applies,
    raised if necessary so the worst case still meets the job's own deadline.
    """
    if retired is None:
        retired = lambda key: False
    nominal = alpha.speed

    # Catch-up guard: never return a level too slow for the deadline itself.
    guard = None
    room = job.deadline - now
    if room > 0:
        guard = cpu.level_at_least(exact_div(job.wcet_remaining, room))
    if guard is None:
        guard = cpu.levels[-1]
    fallback = guard if guard > nominal else nominal

    key = (job.task_id, job.index)
    end = alpha.allocation_end(key)
    if end is None or end <= now:
        return fallback
    available = (end - now) - alpha.busy_other_unretired(key, now, end, retired)
    if available <= 0:
        return fallback
    required = exact_div(job.wcet_remaining, available)
    level = cpu.level_at_least(required)
    if level is None:
        return fallback
    return level if level >= guard else guard


def nominal_speed(ts, cpu: ProcessorModel, horizon: Optional[int] = None):
    """Smallest level that provably sustains the mandatory workload.

    Candidates are the levels at or above the mandatory utilization, each
    validated by simulating the red-only worst-case workload (every permitted
    skip taken, worst-case execution times) over the horizon and checking for
    zero red misses.
    """
    level, _ = nominal_speed_with_reference(ts, cpu, horizon)
    return level


def nominal_speed_with_reference(ts, cpu: ProcessorModel, horizon: Optional[int] = None):
    """Like ``nominal_speed`` but also returns the validating reference trace."""
    from skipsim import engine  # deferred: engine depends on this module

    u_mand = ts.mandatory_utilization
    if u_mand > 1:
        raise InfeasibleNominalSpeedError(
            f"mandatory utilization {u_mand} exceeds 1; no speed can help"
        )
    for s in cpu.levels:
        if s < u_mand:
            continue
        trace = engine.reference_run(ts, s, horizon)
        if not trace.red_misses():
            return s, trace
    raise InfeasibleNominalSpeedError(
        f"no configured level validates for mandatory utilization {u_mand}"
    )


def account(trace, cpu: ProcessorModel) -> EnergyReport:
    """Integrate power over a trace's slices.

    Stand-by power is charged whenever the processor is on (executing or
    idling); the shutdown energy overhead is charged once per power-down
    cycle and covers its overhead slice.
    """
    from skipsim.engine import SliceKind

    e_dynamic = 0
    t_exec = 0
    t_idle = 0
    t_off = 0
    t_overhead = 0
    cursor = None
    cycles: Dict[Tuple[int, int], Number] = {}
    for sl in trace.slices:
        if cursor is None:
            if sl.start != 0:
                raise MalformedTraceError(f"trace does not start at 0 (got {sl.start})")
        elif sl.start != cursor:
            raise MalformedTraceError(f"gap or overlap at {cursor}")
        cursor = sl.end
        length = sl.end - sl.start
        if sl.kind is SliceKind.JOB:
            t_exec = t_exec + length
            e_dynamic = e_dynamic + power(cpu, sl.speed) * length
            if cpu.physical is not None:
                key = (sl.task_id, sl.index)
                f = cpu.physical.entry(sl.speed)[1]
                cycles[key] = cycles.get(key, 0) + f * length
        elif sl.kind is SliceKind.IDLE:
            t_idle = t_idle + length
        elif sl.kind is SliceKind.OFF:
            t_off = t_off + length
        else:
            t_overhead = t_overhead + length
    if cursor is None:
        cursor = 0
    if cursor != trace.horizon:
        raise MalformedTraceError(f"slices end at {cursor}, horizon is {trace.horizon}")
    return EnergyReport(
        e_dynamic=e_dynamic,
        e_standby=cpu.p_standby * (t_exec + t_idle),
        e_shutdown_total=trace.shutdown_count * cpu.e_shutdown,
        t_exec=t_exec,
        t_idle_on=t_idle,
        t_off=t_off,
        t_overhead_total=t_overhead,
        shutdown_count=trace.shutdown_count,
        cycles=cycles if cpu.physical is not None else None,
    )


def normalized_energy(report: EnergyReport, baseline: EnergyReport):
    """Energy relative to the same run without voltage scaling or power-down."""
    if baseline.e_total == 0:
        raise ZeroBaselineError("baseline run consumed no energy")
    return exact_div(report.e_total, baseline.e_total)
