"""Cross-cutting randomized invariants over whole simulation runs."""

import warnings

from hypothesis import given, settings
from hypothesis import strategies as st

from skipsim.energy import ProcessorModel, account
from skipsim.engine import OutcomeKind, SimOptions, SliceKind, run_simulation
from skipsim.errors import HyperperiodAlignmentWarning, InfeasibleNominalSpeedError
from skipsim.metrics import success_ratios
from skipsim.policies import Policy
from skipsim.taskmodel import Color, ColoringMode, TaskSpec, validate_task_set

CPU = ProcessorModel()


def small_task_sets():
    task = st.tuples(st.integers(2, 12), st.integers(1, 12), st.sampled_from([2, 3, 4]))
    return st.lists(task, min_size=1, max_size=4).map(
        lambda raw: validate_task_set(
            [
                TaskSpec(id=i + 1, period=p, wcet=min(c, p), skip_factor=sf)
                for i, (p, c, sf) in enumerate(raw)
            ]
        )
    )


@settings(max_examples=120, deadline=None)
@given(
    ts=small_task_sets(),
    policy=st.sampled_from(list(Policy)),
    seed=st.integers(0, 2**32),
    coloring=st.sampled_from(list(ColoringMode)),
    dpd=st.booleans(),
    dvs=st.booleans(),
)
def test_run_invariants(ts, policy, seed, coloring, dpd, dvs):
    horizon = min(ts.hyperperiod, 120)
    opts = SimOptions(seed=seed, horizon=horizon, coloring=coloring, dpd=dpd, dvs=dvs)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", HyperperiodAlignmentWarning)
        try:
            trace = run_simulation(ts, policy, CPU, opts)
        except InfeasibleNominalSpeedError:
            assert dvs
            return

    # slices tile the horizon exactly
    cursor = 0
    for sl in trace.slices:
        assert sl.start == cursor
        assert sl.end > sl.start
        cursor = sl.end
    assert cursor == trace.horizon

    # exactly one outcome per released instance
    for t in ts.tasks:
        released = sum(
            1
            for k in range(horizon // t.period + 1)
            if (k + 1) * t.period <= horizon
        )
        got = sum(1 for (tid, _) in trace.outcomes if tid == t.id)
        assert got == released

    # outcome times never exceed deadlines
    for (tid, idx), o in trace.outcomes.items():
        deadline = (idx + 1) * ts.by_id(tid).period
        assert o.time <= deadline

    # blue placement obeys the skip distance: a blue instance is preceded by
    # skip_factor - 1 completed instances of its own task
    by_task = {}
    for (tid, idx), o in sorted(trace.outcomes.items()):
        by_task.setdefault(tid, []).append(o)
    for t in ts.tasks:
        outcomes = by_task.get(t.id, [])
        for i, o in enumerate(outcomes):
            if o.color is Color.BLUE:
                assert i >= t.skip_factor - 1, f"premature blue at index {i}"
                window = outcomes[i - (t.skip_factor - 1) : i]
                assert all(
                    w.result is OutcomeKind.COMPLETED for w in window
                ), f"blue at index {i} of task {t.id} without enough completions"

    # accounting identity
    rep = account(trace, CPU)
    assert rep.t_exec + rep.t_idle_on + rep.t_off + rep.t_overhead_total == horizon
    assert rep.e_total == rep.e_dynamic + rep.e_standby + rep.e_shutdown_total

    # counter conservation
    metrics = success_ratios(trace, ts)
    for tid, c in metrics.per_task.items():
        assert 0 <= float(c.success_ratio) <= 1

    # Reds never miss when voltage scaling is on and the coloring follows
    # the automaton: the nominal speed is validated against exactly that
    # red pattern. RANDOM coloring may legally decline permitted skips,
    # so its red load can exceed the mandatory pattern and miss even at
    # full speed on overloaded sets.
    if dvs and coloring is ColoringMode.AUTOMATON:
        assert trace.red_misses() == []

    # power-down slices only when enabled
    if not dpd:
        assert all(
            sl.kind in (SliceKind.JOB, SliceKind.IDLE) for sl in trace.slices
        )
