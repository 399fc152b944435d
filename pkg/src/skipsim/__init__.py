"""Preemptive uniprocessor scheduling simulator for skippable periodic tasks,
with red-tasks-only, background-blue, and latest-start-red policies, plus
inter-task voltage scaling and dynamic power-down."""

from skipsim.energy import (
    CanonicalSchedule,
    EnergyReport,
    ProcessorModel,
    account,
    dpd_decide,
    dra_speed,
    nominal_speed,
    normalized_energy,
    power,
)
from skipsim.engine import (
    OutcomeKind,
    SimOptions,
    Slice,
    SliceKind,
    Trace,
    draw_actual_execution_time,
    run_simulation,
)
from skipsim.metrics import Metrics, ResultRow, export, success_ratios
from skipsim.policies import (
    EdlJob,
    EdlSchedule,
    Policy,
    ReadyQueues,
    bwp_select,
    compute_edl_schedule,
    rlp_select,
    rto_select,
)
from skipsim.rational import RAT_BACKEND, Rat, rat
from skipsim.taskmodel import (
    NO_SKIPS,
    Color,
    ColoringMode,
    JobInstance,
    SkipState,
    TaskSet,
    TaskSpec,
    hyperperiod,
    mandatory_utilization,
    next_color,
    utilization,
    validate_task_set,
)
from skipsim.workload import GenConfig, generate_task_set

__version__ = "0.1.0"
