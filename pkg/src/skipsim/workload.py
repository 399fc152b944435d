"""Seeded random task-set generation.

Periods are drawn from a bounded range; by default every period after the
first is a random integer multiple of the first, which keeps hyperperiods
small. Computation times are drawn from a bounded range clamped to the
period.
"""

import random
from dataclasses import dataclass, field
from typing import Tuple, Union

from skipsim.errors import ConfigError
from skipsim.rational import Rat, rat
from skipsim.seeds import derive_seed
from skipsim.taskmodel import SkipFactor, TaskSet, TaskSpec, validate_task_set


@dataclass(frozen=True)
class GenConfig:
    """Knobs of the generator; defaults match the experiment protocol."""

    n_tasks: int = 2
    period_range: Tuple[int, int] = (3, 100)
    wcet_range: Tuple[int, int] = (1, 15)
    skip_factor: SkipFactor = 2
    seed: int = 0
    multiples_rule: bool = True
    bcet_fraction: Union[int, Rat] = field(default_factory=lambda: rat(1, 2))
    allow_any_n: bool = False


def generate_task_set(cfg: GenConfig) -> TaskSet:
    """Draw a task set deterministically from ``cfg.seed``."""
    if not cfg.allow_any_n and not (2 <= cfg.n_tasks <= 10):
        raise ConfigError(f"n_tasks {cfg.n_tasks} outside 2..10 (set allow_any_n to override)")
    if cfg.n_tasks < 1:
        raise ConfigError("n_tasks must be positive")
    p_lo, p_hi = cfg.period_range
    c_lo, c_hi = cfg.wcet_range
    if p_lo < 1 or p_lo > p_hi or c_lo < 1 or c_lo > c_hi:
        raise ConfigError("invalid period or wcet range")

    rng = random.Random(derive_seed(cfg.seed, "taskset"))
    specs = []
    first_period = rng.randint(p_lo, p_hi)
    for i in range(cfg.n_tasks):
        if i == 0:
            period = first_period
        elif cfg.multiples_rule:
            # Multiplier 1 is allowed, so a multiple always exists.
            period = first_period * rng.randint(1, max(1, p_hi // first_period))
        else:
            period = rng.randint(p_lo, p_hi)
        hi = min(c_hi, period)
        lo = min(c_lo, hi)
        wcet = rng.randint(lo, hi)
        specs.append(
            TaskSpec(
                id=i + 1,
                period=period,
                wcet=wcet,
                skip_factor=cfg.skip_factor,
                bcet_fraction=cfg.bcet_fraction,
            )
        )
    return validate_task_set(specs)


def format_taskset(ts: TaskSet) -> str:
    """Render a task set in the plain-text exchange format."""
    lines = ["# period wcet skip_factor"]
    for t in ts.tasks:
        sf = "inf" if t.never_skips else str(t.skip_factor)
        lines.append(f"{t.period} {t.wcet} {sf}")
    return "\n".join(lines) + "\n"
