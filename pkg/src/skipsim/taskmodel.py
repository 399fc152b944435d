"""Periodic task sets with skip tolerances, job instances, and coloring.

A task releases one instance per period; each instance is red (must meet its
deadline) or blue (may be skipped). The distance between two permitted skips
of a task is at least ``skip_factor`` periods, enforced by a per-task counter
of consecutive completions.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Sequence, Union

from skipsim.errors import (
    EmptyTaskSetError,
    InvalidSkipFactorError,
    InvalidWcetError,
)
from skipsim.rational import Rat, rat

NO_SKIPS = math.inf

SkipFactor = Union[int, float]


class Color(Enum):
    RED = "red"
    BLUE = "blue"


class ColoringMode(Enum):
    AUTOMATON = "automaton"
    RANDOM = "random"


class JobState(Enum):
    PENDING = "pending"
    RUNNING = "running"
    COMPLETED = "completed"
    ABORTED = "aborted"


@dataclass(frozen=True)
class TaskSpec:
    """Static parameters of one periodic task.

    ``wcet`` is the worst-case execution time at maximum speed; the relative
    deadline always equals the period. ``bcet_fraction`` scales the lower
    bound of the per-instance actual execution time.
    """

    id: int
    period: int
    wcet: int
    skip_factor: SkipFactor = 2
    bcet_fraction: Union[int, Rat] = field(default_factory=lambda: rat(1, 2))

    @property
    def utilization(self):
        return rat(self.wcet, self.period)

    @property
    def never_skips(self) -> bool:
        return self.skip_factor == NO_SKIPS

    def __repr__(self):
        sf = "inf" if self.never_skips else str(self.skip_factor)
        return f"TaskSpec(id={self.id}, period={self.period}, wcet={self.wcet}, skip_factor={sf})"


@dataclass(frozen=True)
class TaskSet:
    """A validated task set with its derived set-level quantities."""

    tasks: tuple
    hyperperiod: int
    total_utilization: Union[int, Rat]
    mandatory_utilization: Union[int, Rat]

    def __len__(self):
        return len(self.tasks)

    def __iter__(self):
        return iter(self.tasks)

    def by_id(self, task_id: int) -> TaskSpec:
        for t in self.tasks:
            if t.id == task_id:
                return t
        raise KeyError(task_id)


@dataclass
class SkipState:
    """Counts consecutive completed instances since the last skip.

    Owned by a single simulation run; reset on every skip (a blue aborted or
    never executed, or a red deadline miss), incremented on every completion.
    """

    task_id: int
    run_length: int = 0

    def on_complete(self):
        self.run_length += 1

    def on_skip(self):
        self.run_length = 0


@dataclass
class JobInstance:
    """One release of a task: its color, timing window, and remaining work.

    ``wcet_remaining`` and ``actual_remaining`` are measured in execution
    time at maximum speed; running at speed ``s`` for wall time ``w``
    consumes ``w * s`` of both.
    """

    task_id: int
    index: int
    color: Color
    release: Union[int, Rat]
    deadline: Union[int, Rat]
    wcet_remaining: Union[int, Rat]
    actual_remaining: Union[int, Rat]
    state: JobState = JobState.PENDING


def _check_spec(spec: TaskSpec):
    if spec.period <= 0 or not isinstance(spec.period, int):
        raise InvalidWcetError(f"task {spec.id}: period must be a positive integer")
    if not isinstance(spec.wcet, int) or spec.wcet <= 0:
        raise InvalidWcetError(f"task {spec.id}: wcet must be a positive integer")
    if spec.wcet > spec.period:
        raise InvalidWcetError(
            f"task {spec.id}: wcet {spec.wcet} exceeds period {spec.period}"
        )
    sf = spec.skip_factor
    if sf != NO_SKIPS and (not isinstance(sf, int) or sf < 2):
        raise InvalidSkipFactorError(f"task {spec.id}: skip factor {sf!r} (need >= 2 or inf)")
    f = spec.bcet_fraction
    if not (0 < f <= 1):
        raise InvalidWcetError(f"task {spec.id}: bcet_fraction must lie in (0, 1]")


def validate_task_set(specs: Sequence[TaskSpec]) -> TaskSet:
    """Validate task parameters and compute hyperperiod and utilizations."""
    if not specs:
        raise EmptyTaskSetError("task set is empty")
    for spec in specs:
        _check_spec(spec)
    ids = [t.id for t in specs]
    if len(set(ids)) != len(ids):
        raise InvalidWcetError("duplicate task ids")
    period_lcm = reduce(math.lcm, (t.period for t in specs))
    u_tot = sum((t.utilization for t in specs), 0)
    u_mand = sum((_mandatory_share(t) for t in specs), 0)
    return TaskSet(
        tasks=tuple(specs),
        hyperperiod=period_lcm,
        total_utilization=u_tot,
        mandatory_utilization=u_mand,
    )


def _mandatory_share(spec: TaskSpec):
    if spec.never_skips:
        return spec.utilization
    sf = spec.skip_factor
    return spec.utilization * rat(sf - 1, sf)


def hyperperiod(ts: TaskSet) -> int:
    """Least common multiple of all task periods."""
    return reduce(math.lcm, (t.period for t in ts.tasks))


def utilization(ts: TaskSet):
    """Aggregate utilization at maximum speed, exact."""
    return sum((t.utilization for t in ts.tasks), 0)


def mandatory_utilization(ts: TaskSet):
    """Long-run load of the instances that must complete when every
    permitted skip is taken: each task contributes
    ``(wcet / period) * (skip_factor - 1) / skip_factor``."""
    return sum((_mandatory_share(t) for t in ts.tasks), 0)


def blue_permitted(state: SkipState, skip_factor: SkipFactor) -> bool:
    """Whether the next instance may legally be blue."""
    if skip_factor == NO_SKIPS:
        return False
    return state.run_length >= skip_factor - 1


def next_color(
    state: SkipState,
    skip_factor: SkipFactor,
    mode: ColoringMode = ColoringMode.AUTOMATON,
    rng=None,
) -> Color:
    """Color of the next released instance.

    AUTOMATON: blue exactly when the run of completions permits it.
    RANDOM: blue with probability 1/2, but only when the automaton permits;
    the randomized generation can never violate the skip-distance constraint.
    """
    if not blue_permitted(state, skip_factor):
        return Color.RED
    if mode is ColoringMode.AUTOMATON:
        return Color.BLUE
    if rng is None:
        raise ValueError("RANDOM coloring requires an rng")
    return Color.BLUE if rng.random() < 0.5 else Color.RED


def project_colors(run_length: int, skip_factor: SkipFactor, count: int):
    """Deterministic forward projection of the automaton.

    Assumes every projected red completes and every projected blue is
    skipped, which is the conservative view a latest-start planner takes of
    instances that are not guaranteed to run.
    """
    out = []
    r = run_length
    for _ in range(count):
        if skip_factor != NO_SKIPS and r >= skip_factor - 1:
            out.append(Color.BLUE)
            r = 0
        else:
            out.append(Color.RED)
            r += 1
    return out
