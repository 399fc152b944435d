"""Plain-text trace export.

One record per line: ``meta`` lines describe the run, ``slice`` lines tile
[0, horizon] in order, ``outcome`` lines list every released job, and an
optional ``edl`` section dumps each latest-start schedule recomputation for
golden-file debugging. Times are serialized exactly (``num/den`` for
non-integers).
"""

from skipsim.engine import SliceKind, Trace
from skipsim.rational import rat_str

_FORMAT_VERSION = 1


def _fmt_meta_value(v):
    if v is None:
        return "-"
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, str):
        return v
    return rat_str(v)


def format_trace(trace: Trace) -> str:
    lines = [f"# skipsim trace v{_FORMAT_VERSION}"]
    for key in sorted(trace.meta):
        lines.append(f"meta {key}={_fmt_meta_value(trace.meta[key])}")
    lines.append(f"meta shutdown_count={trace.shutdown_count}")
    for sl in trace.slices:
        if sl.kind is SliceKind.JOB:
            lines.append(
                "slice start=%s end=%s occupant=job task=%d index=%d color=%s speed=%s"
                % (
                    rat_str(sl.start),
                    rat_str(sl.end),
                    sl.task_id,
                    sl.index,
                    sl.color.value,
                    rat_str(sl.speed),
                )
            )
        else:
            lines.append(
                "slice start=%s end=%s occupant=%s"
                % (rat_str(sl.start), rat_str(sl.end), sl.kind.value)
            )
    for (tid, idx) in sorted(trace.outcomes):
        o = trace.outcomes[(tid, idx)]
        lines.append(
            "outcome task=%d index=%d color=%s result=%s at=%s"
            % (tid, idx, o.color.value, o.result.value, rat_str(o.time))
        )
    for tau, entries, latest in trace.edl_log:
        lines.append(f"edl computed_at={rat_str(tau)}")
        for s, e, key in entries:
            who = "idle" if key is None else f"task={key[0]} index={key[1]}"
            lines.append(f"edl-entry start={rat_str(s)} end={rat_str(e)} {who}")
        for key in sorted(latest):
            lines.append(
                "edl-latest task=%d index=%d start=%s"
                % (key[0], key[1], rat_str(latest[key]))
            )
    return "\n".join(lines) + "\n"


def write_trace(trace: Trace, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_trace(trace))
