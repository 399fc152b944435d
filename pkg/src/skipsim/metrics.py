"""Hit/miss counters, success ratios, and structured CSV/JSON export."""

import json
from dataclasses import dataclass, field
from typing import Dict, List, Sequence, Union

from skipsim.engine import OutcomeKind, Trace
from skipsim.errors import MalformedTraceError
from skipsim.rational import Rat, format_decimal, rat, rat_str
from skipsim.taskmodel import Color, TaskSet

Number = Union[int, Rat]


@dataclass
class TaskCounters:
    red_hit: int = 0
    red_miss: int = 0
    blue_hit: int = 0
    blue_miss: int = 0

    @property
    def instances(self) -> int:
        return self.red_hit + self.red_miss + self.blue_hit + self.blue_miss

    @property
    def hits(self) -> int:
        return self.red_hit + self.blue_hit

    @property
    def success_ratio(self) -> Number:
        if self.instances == 0:
            return 1
        return rat(self.hits, self.instances)


@dataclass
class Metrics:
    """Per-task counters plus the two success-ratio definitions.

    ``avg_success_ratio`` averages the per-task ratios;
    ``aggregate_success_ratio`` is total hits over total instances.
    """

    per_task: Dict[int, TaskCounters]
    avg_success_ratio: Number
    aggregate_success_ratio: Number

    def totals(self) -> TaskCounters:
        out = TaskCounters()
        for c in self.per_task.values():
            out.red_hit += c.red_hit
            out.red_miss += c.red_miss
            out.blue_hit += c.blue_hit
            out.blue_miss += c.blue_miss
        return out


def success_ratios(trace: Trace, ts: TaskSet) -> Metrics:
    """Count hits and misses from a trace's outcome records."""
    per_task = {t.id: TaskCounters() for t in ts.tasks}
    for (tid, _idx), o in trace.outcomes.items():
        c = per_task.get(tid)
        if c is None:
            raise MalformedTraceError(f"outcome for unknown task {tid}")
        hit = o.result is OutcomeKind.COMPLETED
        if o.color is Color.RED:
            if hit:
                c.red_hit += 1
            else:
                c.red_miss += 1
        else:
            if hit:
                c.blue_hit += 1
            else:
                c.blue_miss += 1
    ratios = [c.success_ratio for c in per_task.values()]
    total = sum(ratios, 0)
    if not ratios:
        avg = 1
    elif isinstance(total, int):
        avg = rat(total, len(ratios))
    else:
        avg = total / len(ratios)
    total_hits = sum(c.hits for c in per_task.values())
    total_instances = sum(c.instances for c in per_task.values())
    aggregate = rat(total_hits, total_instances) if total_instances else 1
    return Metrics(per_task=per_task, avg_success_ratio=avg, aggregate_success_ratio=aggregate)


@dataclass
class ResultRow:
    """One exported experiment row; column order is part of the contract."""

    n_tasks: int
    policy: str
    dvs: bool
    dpd: bool
    seed: int
    u_tot: Number
    avg_success_ratio: Number
    aggregate_success_ratio: Number
    red_hit: int
    red_miss: int
    blue_hit: int
    blue_miss: int
    e_total: Number
    normalized_energy: Number


CSV_COLUMNS = [
    "n_tasks",
    "policy",
    "dvs",
    "dpd",
    "seed",
    "u_tot",
    "avg_success_ratio",
    "aggregate_success_ratio",
    "red_hit",
    "red_miss",
    "blue_hit",
    "blue_miss",
    "e_total",
    "normalized_energy",
]

RATIONAL_COLUMNS = [
    "u_tot",
    "avg_success_ratio",
    "aggregate_success_ratio",
    "e_total",
    "normalized_energy",
]


def _row_cells(row: ResultRow) -> List[str]:
    cells = []
    for col in CSV_COLUMNS:
        v = getattr(row, col)
        if col in RATIONAL_COLUMNS:
            cells.append(format_decimal(v))
        elif isinstance(v, bool):
            cells.append("true" if v else "false")
        else:
            cells.append(str(v))
    for col in RATIONAL_COLUMNS:
        cells.append(rat_str(getattr(row, col)))
    return cells


def export(rows: Sequence[ResultRow], fmt: str, path) -> None:
    """Write rows as CSV or JSON; identical inputs give identical bytes.

    Rationals appear as 6-digit decimals in the primary columns and exactly
    as ``num/den`` strings in ``*_exact`` sidecar fields.
    """
    if fmt == "csv":
        header = CSV_COLUMNS + [c + "_exact" for c in RATIONAL_COLUMNS]
        lines = [",".join(header)]
        lines.extend(",".join(_row_cells(r)) for r in rows)
        text = "\n".join(lines) + "\n"
    elif fmt == "json":
        payload = []
        for r in rows:
            obj = {}
            for col in CSV_COLUMNS:
                v = getattr(r, col)
                if col in RATIONAL_COLUMNS:
                    obj[col] = format_decimal(v)
                else:
                    obj[col] = v
            for col in RATIONAL_COLUMNS:
                obj[col + "_exact"] = rat_str(getattr(r, col))
            payload.append(obj)
        text = json.dumps(payload, indent=2) + "\n"
    else:
        raise ValueError(f"unknown export format {fmt!r}")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
