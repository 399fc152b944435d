"""Scheduling policies over ready queues, and latest-start schedule construction.

Three policies are provided:

* ``RTO``  -- earliest-deadline-first over red jobs only; blues never run.
* ``BWP``  -- reds strictly first; blues run EDF in the background.
* ``RLP``  -- blues run EDF in the foreground while reds are deferred to the
  latest start times of a latest-start (EDL-style) schedule of the red
  workload; a red becomes urgent once its latest start arrives.

All selectors are pure functions over immutable queue snapshots. Queues are
kept sorted by (deadline, release, task id); deadline ties therefore resolve
in favour of the earliest release, then the lowest task id.
"""

from dataclasses import dataclass
from enum import Enum
from typing import List, Optional, Sequence, Tuple, Union

from skipsim.errors import InfeasibleRedLoadError, StaleEdlError
from skipsim.rational import Rat
from skipsim.taskmodel import JobInstance


class Policy(Enum):
    RTO = "rto"
    BWP = "bwp"
    RLP = "rlp"


def queue_key(job: JobInstance):
    return (job.deadline, job.release, job.task_id)


@dataclass
class ReadyQueues:
    """Pending red and blue jobs, each list sorted by ``queue_key``."""

    red: List[JobInstance]
    blue: List[JobInstance]


def rto_select(q: ReadyQueues) -> Optional[JobInstance]:
    """Head of the red queue; blues are never selected."""
    return q.red[0] if q.red else None


def bwp_select(q: ReadyQueues) -> Optional[JobInstance]:
    """Head of the red queue, else head of the blue queue."""
    if q.red:
        return q.red[0]
    if q.blue:
        return q.blue[0]
    return None


def rlp_select(
    q: ReadyQueues,
    edl: Optional["EdlSchedule"],
    now,
) -> Optional[JobInstance]:
    """Blues run in the foreground until some red reaches its latest start.

    With no blues pending this is plain EDF over reds. Otherwise a red whose
    latest start has arrived is urgent and takes priority (EDF among urgent
    reds); if none is urgent the earliest-deadline blue runs.
    """
    if not q.blue:
        return q.red[0] if q.red else None
    if q.red:
        if edl is None:
            raise StaleEdlError("blues pending but no latest-start schedule")
        for job in q.red:
            ls = edl.latest_start.get((job.task_id, job.index))
            if ls is None:
                ls = job.release
            if ls <= now:
                return job
    return q.blue[0]


@dataclass(frozen=True)
class EdlJob:
    """One unit of red work for the latest-start construction."""

    key: Tuple[int, int]
    release: Union[int, Rat]
    deadline: Union[int, Rat]
    duration: Union[int, Rat]


@dataclass(frozen=True)
class EdlSchedule:
    """Latest-start schedule of the red workload in [computed_at, horizon].

    ``entries`` lists non-overlapping (start, end, key-or-None) intervals;
    None marks idle time. ``latest_start`` maps each red job key to the first
    instant of its earliest allocated interval.
    """

    computed_at: Union[int, Rat]
    horizon: Union[int, Rat]
    entries: tuple
    latest_start: dict
    idle: tuple
    feasible: bool


def needs_edl_recompute(is_blue: bool, is_release: bool, blue_pending_other: int) -> bool:
    """Recompute triggers: a blue release into an empty blue queue, or a blue
    completion while other blues remain pending."""
    if not is_blue:
        return False
    if is_release:
        return blue_pending_other == 0
    return blue_pending_other > 0


def compute_edl_schedule(
    pending: Sequence[EdlJob],
    future: Sequence[EdlJob],
    tau,
    horizon,
    speed=1,
    strict: bool = True,
) -> EdlSchedule:
    """Place all red work as late as its deadlines allow.

    Construction: mirror time about the horizon, so deadlines become releases
    and vice versa, run preemptive EDF in mirrored time, and mirror the
    resulting slices back. The mirrored-EDF completion of a job is its real
    latest start.

    Durations are scaled by ``speed`` (work / speed = wall time). With
    ``strict`` a job that cannot complete by its deadline raises
    ``InfeasibleRedLoadError``; otherwise its latest start is clamped to its
    release and the schedule is marked infeasible.
    """
    jobs = []
    for j in pending:
        if j.duration > 0:
            jobs.append(EdlJob(j.key, tau, j.deadline, j.duration / speed if speed != 1 else j.duration))
    for j in future:
        if j.duration > 0:
            jobs.append(EdlJob(j.key, j.release, j.deadline, j.duration / speed if speed != 1 else j.duration))
    if not jobs:
        return EdlSchedule(tau, horizon, ((tau, horizon, None),) if horizon > tau else (),
                           {}, ((tau, horizon),) if horizon > tau else (), True)

    top = horizon
    for j in jobs:
        if j.deadline > top:
            top = j.deadline

    # Mirrored view: release' = top - deadline, deadline' = top - release.
    mirrored = sorted(
        (
            (top - j.deadline, top - j.release, j.duration, j.key)
            for j in jobs
        ),
        key=lambda m: (m[0], m[1], m[3]),
    )

    slices = []  # mirrored-time slices (start, end, key)
    finish = {}  # key -> mirrored completion
    active = []  # (deadline', release', key, remaining) kept sorted
    t = mirrored[0][0]
    i = 0
    while i < len(mirrored) or active:
        while i < len(mirrored) and mirrored[i][0] <= t:
            rel, dl, dur, key = mirrored[i]
            active.append([dl, rel, key, dur])
            i += 1
        if not active:
            t = mirrored[i][0]
            continue
        active.sort(key=lambda a: (a[0], a[1], a[2]))
        cur = active[0]
        end = t + cur[3]
        if i < len(mirrored) and mirrored[i][0] < end:
            end = mirrored[i][0]
        slices.append((t, end, cur[2]))
        cur[3] = cur[3] - (end - t)
        if cur[3] == 0:
            finish[cur[2]] = end
            active.pop(0)
        t = end

    infeasible = []
    for rel, dl, dur, key in mirrored:
        if finish[key] > dl:
            infeasible.append(key)
    if infeasible and strict:
        raise InfeasibleRedLoadError(
            f"red jobs cannot meet their deadlines even run as late as possible: {sorted(infeasible)}"
        )

    latest_start = {}
    by_key = {j.key: j for j in jobs}
    for key, done in finish.items():
        ls = top - done
        if key in set(infeasible):
            ls = by_key[key].release
        latest_start[key] = ls

    # Mirror slices back and merge adjacent same-key pieces.
    real = []
    for s, e, key in reversed(slices):
        rs, re_ = top - e, top - s
        if real and real[-1][2] == key and real[-1][1] == rs:
            real[-1] = (real[-1][0], re_, key)
        else:
            real.append((rs, re_, key))

    entries = []
    idle = []
    cursor = tau
    for rs, re_, key in real:
        if re_ <= tau:
            continue  # only reachable in lenient infeasible schedules
        if rs < tau:
            rs = tau
        if rs > cursor:
            entries.append((cursor, rs, None))
            idle.append((cursor, rs))
        entries.append((rs, re_, key))
        cursor = re_ if re_ > cursor else cursor
    if cursor < top:
        entries.append((cursor, top, None))
        idle.append((cursor, top))

    return EdlSchedule(
        computed_at=tau,
        horizon=top,
        entries=tuple(entries),
        latest_start=latest_start,
        idle=tuple(idle),
        feasible=not infeasible,
    )


def idle_before(edl: EdlSchedule, t) -> Union[int, Rat]:
    """Total idle time in [computed_at, t] of a latest-start schedule."""
    total = 0
    for s, e in edl.idle:
        if s >= t:
            break
        total = total + ((e if e <= t else t) - s)
    return total
