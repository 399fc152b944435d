"""Event-driven preemptive uniprocessor simulation.

The loop alternates between asking the active policy for a job, advancing
time to the next boundary (release, deadline, completion, red urgency, or
horizon), and applying the speed-scaling and power-down hooks at dispatch and
idle boundaries. Identical inputs, including the seed, produce identical
traces.

Internally all instants are integer ticks of 1/16 time unit, the grid on
which actual execution times are drawn; fractional speeds introduce exact
rationals on top. Published traces are converted back to time units.

Simultaneous events are processed in the fixed order deadline expiry, then
completion, then releases, then red-urgency re-evaluation, so a job released
at another's deadline sees the expired job retired, and a release coinciding
with a completion of its own task sees that completion in its coloring.
"""

import warnings
from bisect import insort
from dataclasses import dataclass
from enum import Enum
from math import floor
from typing import Dict, List, Optional, Tuple, Union

from skipsim.energy import (
    CanonicalSchedule,
    ProcessorModel,
    dpd_decide,
    dra_speed,
    nominal_speed_with_reference,
)
from skipsim.errors import ConfigError, HyperperiodAlignmentWarning
from skipsim.policies import (
    EdlJob,
    EdlSchedule,
    Policy,
    ReadyQueues,
    bwp_select,
    compute_edl_schedule,
    needs_edl_recompute,
    queue_key,
    rlp_select,
    rto_select,
)
from skipsim.rational import Rat, exact_div, rat
from skipsim.seeds import substream
from skipsim.taskmodel import (
    NO_SKIPS,
    Color,
    ColoringMode,
    SkipState,
    TaskSet,
    TaskSpec,
    next_color,
)

SCALE = 16  # ticks per time unit; the quantization grid of execution draws


class SliceKind(Enum):
    JOB = "job"
    IDLE = "idle"
    OFF = "off"
    OVERHEAD = "overhead"


class OutcomeKind(Enum):
    COMPLETED = "completed"
    ABORTED = "aborted"
    SKIPPED = "skipped"


@dataclass(frozen=True)
class Slice:
    """One maximal interval with a constant occupant (and speed, for jobs)."""

    start: Union[int, Rat]
    end: Union[int, Rat]
    kind: SliceKind
    task_id: Optional[int] = None
    index: Optional[int] = None
    color: Optional[Color] = None
    speed: Optional[Union[int, Rat]] = None


@dataclass(frozen=True)
class Outcome:
    task_id: int
    index: int
    color: Color
    result: OutcomeKind
    time: Union[int, Rat]


@dataclass(frozen=True)
class Trace:
    """Slices tiling [0, horizon] plus one outcome record per released job."""

    horizon: int
    slices: tuple
    outcomes: dict  # (task_id, index) -> Outcome
    shutdown_count: int
    meta: dict
    edl_log: tuple = ()

    def red_misses(self):
        return [
            k
            for k, o in self.outcomes.items()
            if o.color is Color.RED and o.result is not OutcomeKind.COMPLETED
        ]

    def completed_reds(self):
        return frozenset(
            k
            for k, o in self.outcomes.items()
            if o.color is Color.RED and o.result is OutcomeKind.COMPLETED
        )

    def coloring(self) -> Dict[int, Dict[int, Color]]:
        out: Dict[int, Dict[int, Color]] = {}
        for (tid, idx), o in self.outcomes.items():
            out.setdefault(tid, {})[idx] = o.color
        return out


@dataclass
class SimOptions:
    """Per-run switches; every field participates in the determinism contract."""

    dvs: bool = False
    dpd: bool = False
    coloring: ColoringMode = ColoringMode.AUTOMATON
    seed: int = 0
    horizon: Optional[int] = None
    bwp_abort_literal: bool = False
    strict_horizon: bool = False
    fixed_speed: Optional[Union[int, Rat]] = None
    wcet_workload: bool = False
    color_override: Optional[Dict[int, Dict[int, Color]]] = None
    edl_debug: bool = False
    # Speed of blue jobs when voltage scaling is on: the nominal dispatch
    # speed (raised when a blue could no longer finish by its deadline),
    # full speed, or the slowest level that still meets the deadline.
    blue_dvs_speed: str = "nominal"  # "nominal" | "max" | "stretch"


@dataclass
class _Job:
    spec: TaskSpec
    index: int
    color: Color
    release: int  # ticks
    deadline: int  # ticks
    wcet_remaining: Union[int, Rat]  # work at full speed, ticks
    actual_remaining: Union[int, Rat]
    touched: bool = False

    @property
    def task_id(self):
        return self.spec.id


def _ceil_div(n: int, d: int) -> int:
    return -((-n) // d)


def draw_actual_execution_time(spec: TaskSpec, rng):
    """Actual execution time for one instance, in time units.

    Uniform on [bcet_fraction * wcet, wcet], quantized to the 1/16 grid.
    """
    return rat(draw_actual_ticks(spec, rng), SCALE)


def draw_actual_ticks(spec: TaskSpec, rng) -> int:
    hi = spec.wcet * SCALE
    f = spec.bcet_fraction
    if f == 1:
        return hi
    if isinstance(f, int):
        lo = f * hi
    else:
        lo = _ceil_div(f.n * hi, f.d)
    return rng.randint(lo, hi)


def _to_units(x):
    if isinstance(x, int):
        return rat(x, SCALE)
    return x / SCALE


class _Run:
    """Mutable state of one simulation; built, executed once, discarded."""

    def __init__(self, ts: TaskSet, policy: Policy, cpu: ProcessorModel, opts: SimOptions):
        self.ts = ts
        self.policy = policy
        self.cpu = cpu
        self.opts = opts

        horizon = opts.horizon if opts.horizon is not None else ts.hyperperiod
        if horizon <= 0 or not isinstance(horizon, int):
            raise ConfigError("horizon must be a positive integer number of time units")
        if horizon % ts.hyperperiod != 0:
            msg = (
                f"horizon {horizon} is not a multiple of the hyperperiod "
                f"{ts.hyperperiod}; skip patterns will not close"
            )
            if opts.strict_horizon:
                raise ConfigError(msg)
            warnings.warn(msg, HyperperiodAlignmentWarning)
        self.horizon_units = horizon
        self.end = horizon * SCALE

        if opts.fixed_speed is not None and opts.dvs:
            raise ConfigError("fixed_speed and dvs are mutually exclusive")

        self.s_nom = None
        self.alpha: Optional[CanonicalSchedule] = None
        if opts.dvs:
            self.s_nom, ref = nominal_speed_with_reference(ts, cpu, horizon)
            self.alpha = CanonicalSchedule(
                self.s_nom,
                [
                    (sl.start * SCALE, sl.end * SCALE, (sl.task_id, sl.index))
                    for sl in ref.slices
                    if sl.kind is SliceKind.JOB
                ],
            )

        self.plan_speed = (
            opts.fixed_speed
            if opts.fixed_speed is not None
            else (self.s_nom if opts.dvs else 1)
        )

        self.states = {t.id: SkipState(t.id) for t in ts.tasks}
        self.next_index = {t.id: 0 for t in ts.tasks}
        self.period_ticks = {t.id: t.period * SCALE for t in ts.tasks}
        self.red: List[_Job] = []
        self.blue: List[_Job] = []
        self.running: Optional[_Job] = None
        self.speed = None
        self.outcomes: Dict[Tuple[int, int], Outcome] = {}
        self.slices: list = []
        self.shutdowns = 0
        self.edl: Optional[EdlSchedule] = None
        self.edl_log: list = []
        self.now = 0

    # -- helpers ---------------------------------------------------------

    def _emit(self, start, end, kind, job=None, speed=None):
        if end == start:
            return
        if self.slices:
            last = self.slices[-1]
            if (
                last[2] is kind
                and last[1] == start
                and (job is None or (last[3] == job.task_id and last[4] == job.index))
                and last[6] == speed
            ):
                self.slices[-1] = (last[0], end, kind, last[3], last[4], last[5], speed)
                return
        if job is None:
            self.slices.append((start, end, kind, None, None, None, None))
        else:
            self.slices.append((start, end, kind, job.task_id, job.index, job.color, speed))

    def _retire(self, job, result, t):
        key = (job.task_id, job.index)
        self.outcomes[key] = Outcome(job.task_id, job.index, job.color, result, t)
        q = self.red if job.color is Color.RED else self.blue
        q.remove(job)
        if self.running is job:
            self.running = None
            self.speed = None
        state = self.states[job.task_id]
        if result is OutcomeKind.COMPLETED:
            state.on_complete()
        else:
            state.on_skip()

    def _next_release(self):
        best = None
        for t in self.ts.tasks:
            k = self.next_index[t.id]
            r = k * self.period_ticks[t.id]
            if r + self.period_ticks[t.id] > self.end:
                continue
            if best is None or r < best:
                best = r
        return best

    def _select(self) -> Optional[_Job]:
        q = ReadyQueues(self.red, self.blue)
        if self.policy is Policy.RTO:
            return rto_select(q)
        if self.policy is Policy.BWP:
            return bwp_select(q)
        return rlp_select(q, self.edl, self.now)

    def _pick_speed(self, job):
        if self.opts.fixed_speed is not None:
            return self.opts.fixed_speed
        if not self.opts.dvs:
            return 1
        if job.color is Color.BLUE:
            if self.opts.blue_dvs_speed == "max":
                return 1
            room = job.deadline - self.now
            need = None
            if room > 0:
                need = self.cpu.level_at_least(exact_div(job.wcet_remaining, room))
            if need is None:
                need = 1
            if self.opts.blue_dvs_speed == "stretch":
                # slowest level that still finishes a worst-case blue by its
                # deadline when left undisturbed
                return need
            # "nominal": the dispatch default, raised when it could not
            # finish the blue by its deadline even undisturbed
            return need if need > self.s_nom else self.s_nom
        # Reclamation consumes slack a waiting blue could otherwise run in,
        # so while a blue is pending the dispatched red keeps the nominal
        # speed (raised if its own deadline demands more) and the slack goes
        # to the blue. RTO rejects blues outright, so nothing is waiting.
        if self.blue and self.policy is not Policy.RTO:
            room = job.deadline - self.now
            need = None
            if room > 0:
                need = self.cpu.level_at_least(exact_div(job.wcet_remaining, room))
            if need is None:
                need = 1
            return need if need > self.s_nom else self.s_nom
        speed = dra_speed(
            self.alpha,
            job,
            self.now,
            self.cpu,
            retired=lambda key: key in self.outcomes,
        )
        if speed < self.s_nom:
            # A sub-nominal stretch must stay invisible to jobs not yet
            # released: keep it only while the worst case still completes by
            # the next arrival, else raise it (at most back to nominal).
            nr = self._next_release()
            if nr is not None and self.now + exact_div(job.wcet_remaining, speed) > nr:
                need = (
                    self.cpu.level_at_least(
                        exact_div(job.wcet_remaining, nr - self.now)
                    )
                    if nr > self.now
                    else None
                )
                if need is None or need > self.s_nom:
                    speed = self.s_nom
                else:
                    speed = need
        return speed

    def _build_edl(self):
        tau = self.now
        pending = [
            EdlJob((j.task_id, j.index), j.release, j.deadline, j.wcet_remaining)
            for j in self.red
        ]
        hyper_ticks = self.ts.hyperperiod * SCALE
        boundary = (floor(exact_div(tau, hyper_ticks)) + 1) * hyper_ticks
        if boundary > self.end:
            boundary = self.end
        future = []
        for t in self.ts.tasks:
            p = self.period_ticks[t.id]
            r = self.states[t.id].run_length
            sf = t.skip_factor
            k = self.next_index[t.id]
            rel = k * p
            while rel < boundary and rel + p <= self.end:
                blue = sf != NO_SKIPS and r >= sf - 1
                if blue:
                    r = 0
                else:
                    future.append(EdlJob((t.id, k), rel, rel + p, t.wcet * SCALE))
                    r += 1
                k += 1
                rel = k * p
        edl = compute_edl_schedule(
            pending, future, tau, boundary, speed=self.plan_speed, strict=False
        )
        if self.opts.edl_debug:
            self.edl_log.append(
                (
                    _to_units(tau),
                    tuple(
                        (_to_units(s), _to_units(e), key) for s, e, key in edl.entries
                    ),
                    {k: _to_units(v) for k, v in sorted(edl.latest_start.items())},
                )
            )
        return edl

    def _latest_start(self, job):
        if self.edl is None:
            return job.release
        ls = self.edl.latest_start.get((job.task_id, job.index))
        return job.release if ls is None else ls

    # -- event processing --------------------------------------------------

    def _process_events(self, t):
        trigger = False
        # 1. deadline expirations (jobs completing exactly now are spared)
        for q in (self.red, self.blue):
            expired = []
            for j in q:
                if j.deadline > t:
                    break
                if j.actual_remaining > 0:
                    expired.append(j)
            for j in expired:
                self._retire(
                    j, OutcomeKind.ABORTED if j.touched else OutcomeKind.SKIPPED, t
                )
        # 2. completion of the running job. Processed before releases so a job
        # finishing exactly at its own deadline counts as completed when its
        # successor, released at that same instant, is colored: a blue that
        # completes successfully is followed by a blue.
        j = self.running
        if j is not None and j.actual_remaining == 0:
            was_blue = j.color is Color.BLUE
            self._retire(j, OutcomeKind.COMPLETED, t)
            if was_blue and needs_edl_recompute(True, False, len(self.blue)):
                trigger = True
        # 3. releases
        released_red = False
        for spec in self.ts.tasks:
            k = self.next_index[spec.id]
            p = self.period_ticks[spec.id]
            rel = k * p
            if rel != t or rel + p > self.end:
                continue
            color = self._color_for(spec, k)
            wcet_ticks = spec.wcet * SCALE
            if self.opts.wcet_workload:
                a = wcet_ticks
            else:
                a = draw_actual_ticks(
                    spec, substream(self.opts.seed, "exec", spec.id, k)
                )
            job = _Job(spec, k, color, rel, rel + p, wcet_ticks, a)
            if color is Color.BLUE:
                if not self.blue:
                    trigger = trigger or needs_edl_recompute(True, True, 0)
                insort(self.blue, job, key=queue_key)
            else:
                insort(self.red, job, key=queue_key)
                released_red = True
            self.next_index[spec.id] = k + 1
        if (
            released_red
            and self.opts.bwp_abort_literal
            and self.policy is Policy.BWP
            and self.running is not None
            and self.running.color is Color.BLUE
        ):
            self._retire(self.running, OutcomeKind.ABORTED, t)
        # 4. red-urgency instants need no state change; selection sees them
        if self.policy is Policy.RLP and trigger:
            self.edl = self._build_edl()

    def _color_for(self, spec, index):
        override = self.opts.color_override
        if override is not None:
            mapped = override.get(spec.id)
            if mapped is not None and index in mapped:
                return mapped[index]
        rng = None
        if self.opts.coloring is ColoringMode.RANDOM:
            rng = substream(self.opts.seed, "color", spec.id, index)
        return next_color(
            self.states[spec.id], spec.skip_factor, self.opts.coloring, rng
        )

    # -- main loop ---------------------------------------------------------

    def run(self) -> Trace:
        self._process_events(0)
        while self.now < self.end:
            job = self._select()
            # Every scheduling boundary (release, completion, expiry,
            # urgency) is a dispatch point under inter-task scaling: the
            # speed is re-evaluated even when the same job continues, so a
            # reclaimed slow-down never outlives the slack it was based on
            # (a newly released blue immediately restores the nominal pace).
            self.running = job
            self.speed = self._pick_speed(job) if job is not None else None
            nb = self.end
            nr = self._next_release()
            if nr is not None and nr < nb:
                nb = nr
            for q in (self.red, self.blue):
                if q and q[0].deadline < nb:
                    nb = q[0].deadline
            if job is not None:
                rem = job.actual_remaining
                completion = self.now + (rem if self.speed == 1 else rem / self.speed)
                if completion < nb:
                    nb = completion
            if self.policy is Policy.RLP and self.blue and self.edl is not None:
                for rj in self.red:
                    if rj is job:
                        continue
                    ls = self._latest_start(rj)
                    if self.now < ls < nb:
                        nb = ls
            if job is None:
                self._idle_gap(self.now, nb)
            else:
                self._emit(self.now, nb, SliceKind.JOB, job, self.speed)
                delta = nb - self.now
                work = delta if self.speed == 1 else delta * self.speed
                job.actual_remaining = job.actual_remaining - work
                job.wcet_remaining = job.wcet_remaining - work
                job.touched = True
            self.now = nb
            self._process_events(self.now)
        return self._finish()

    def _idle_gap(self, start, end):
        if self.opts.dpd and dpd_decide(_to_units(start), _to_units(end), self.cpu):
            self.shutdowns += 1
            split = start + self.cpu.t_overhead * SCALE
            self._emit(start, split, SliceKind.OVERHEAD)
            self._emit(split, end, SliceKind.OFF)
        else:
            self._emit(start, end, SliceKind.IDLE)

    def _finish(self) -> Trace:
        slices = tuple(
            Slice(
                start=_to_units(s),
                end=_to_units(e),
                kind=kind,
                task_id=tid,
                index=idx,
                color=color,
                speed=speed,
            )
            for s, e, kind, tid, idx, color, speed in self.slices
        )
        outcomes = {
            key: Outcome(o.task_id, o.index, o.color, o.result, _to_units(o.time))
            for key, o in sorted(self.outcomes.items())
        }
        meta = {
            "policy": self.policy.value,
            "dvs": self.opts.dvs,
            "dpd": self.opts.dpd,
            "seed": self.opts.seed,
            "coloring": self.opts.coloring.value,
            "horizon": self.horizon_units,
            "bwp_abort_literal": self.opts.bwp_abort_literal,
            "nominal_speed": self.s_nom,
            "fixed_speed": self.opts.fixed_speed,
        }
        return Trace(
            horizon=self.horizon_units,
            slices=slices,
            outcomes=outcomes,
            shutdown_count=self.shutdowns,
            meta=meta,
            edl_log=tuple(self.edl_log),
        )


def run_simulation(
    ts: TaskSet,
    policy: Policy,
    cpu: Optional[ProcessorModel] = None,
    opts: Optional[SimOptions] = None,
) -> Trace:
    """Simulate one run; a deterministic function of all four arguments."""
    if cpu is None:
        cpu = ProcessorModel()
    if opts is None:
        opts = SimOptions()
    return _Run(ts, policy, cpu, opts).run()


def reference_run(ts: TaskSet, speed, horizon: Optional[int] = None) -> Trace:
    """Red-only worst-case run at a fixed speed: every permitted skip taken,
    worst-case execution times, red jobs scheduled earliest-deadline-first.

    Doubles as the nominal-speed validation run and as the canonical schedule
    that dynamic reclamation measures earliness against.
    """
    opts = SimOptions(
        fixed_speed=speed,
        wcet_workload=True,
        coloring=ColoringMode.AUTOMATON,
        horizon=horizon,
    )
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HyperperiodAlignmentWarning)
        return run_simulation(ts, Policy.RTO, ProcessorModel(), opts)
