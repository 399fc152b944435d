"""Loading of task-set files and the JSON configuration file.

Task-set files are plain text, one task per line with fields
``period wcet skip_factor`` (skip factor ``inf`` means no skips are
permitted); ``#`` starts a comment. The JSON config file can override the
processor model, generator ranges, and simulation defaults; command-line
flags override the config file.
"""

import json
import os
from dataclasses import dataclass, field
from typing import Optional, Union

from skipsim.energy import PhysicalTables, ProcessorModel
from skipsim.errors import ConfigError
from skipsim.rational import Rat, parse_rat, rat
from skipsim.taskmodel import NO_SKIPS, TaskSet, TaskSpec, validate_task_set

CONFIG_ENV_VAR = "SKIPSIM_CONFIG"

DEFAULT_HORIZON_CAP = 600


def load_taskset(path, bcet_fraction=None) -> TaskSet:
    """Read a task set from the plain-text format."""
    specs = []
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 3:
                raise ConfigError(f"{path}:{lineno}: expected 'period wcet skip_factor'")
            try:
                period = int(parts[0])
                wcet = int(parts[1])
                sf = NO_SKIPS if parts[2].lower() in ("inf", "infinity") else int(parts[2])
            except ValueError as exc:
                raise ConfigError(f"{path}:{lineno}: {exc}") from exc
            kwargs = {}
            if bcet_fraction is not None:
                kwargs["bcet_fraction"] = bcet_fraction
            specs.append(
                TaskSpec(id=len(specs) + 1, period=period, wcet=wcet, skip_factor=sf, **kwargs)
            )
    return validate_task_set(specs)


@dataclass
class Settings:
    """Merged configuration defaults (file below flags)."""

    processor: ProcessorModel = field(default_factory=ProcessorModel)
    horizon_cap: int = DEFAULT_HORIZON_CAP
    bcet_fraction: Union[int, Rat] = field(default_factory=lambda: rat(1, 2))
    period_range: tuple = (3, 100)
    wcet_range: tuple = (1, 15)
    skip_factor: Union[int, float] = 2
    multiples_rule: bool = True


def _parse_processor(obj) -> ProcessorModel:
    kwargs = {}
    if "levels" in obj:
        kwargs["levels"] = tuple(parse_rat(str(x)) for x in obj["levels"])
    for key in ("p_standby", "e_shutdown", "t_overhead"):
        if key in obj:
            kwargs[key] = parse_rat(str(obj[key]))
    if "physical" in obj:
        phys = obj["physical"]
        table = tuple(
            (
                parse_rat(str(level)),
                parse_rat(str(entry["v_dd"])),
                parse_rat(str(entry["f"])),
            )
            for level, entry in sorted(phys.get("table", {}).items())
        )
        kwargs["physical"] = PhysicalTables(
            c_ef=parse_rat(str(phys.get("c_ef", 1))),
            k_const=parse_rat(str(phys.get("k", 1))),
            v_threshold=parse_rat(str(phys.get("v_t", 0))),
            table=table,
        )
    return ProcessorModel(**kwargs)


def load_settings(path: Optional[str] = None) -> Settings:
    """Settings from a JSON config file, the env var, or built-in defaults."""
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR)
    settings = Settings()
    if not path:
        return settings
    try:
        with open(path, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError:
        raise
    except ValueError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    if "processor" in data:
        settings.processor = _parse_processor(data["processor"])
    sim = data.get("simulation", {})
    if "horizon_cap" in sim:
        settings.horizon_cap = int(sim["horizon_cap"])
    if "bcet_fraction" in sim:
        settings.bcet_fraction = parse_rat(str(sim["bcet_fraction"]))
    gen = data.get("generator", {})
    if "period_range" in gen:
        settings.period_range = tuple(int(x) for x in gen["period_range"])
    if "wcet_range" in gen:
        settings.wcet_range = tuple(int(x) for x in gen["wcet_range"])
    if "skip_factor" in gen:
        sf = gen["skip_factor"]
        settings.skip_factor = NO_SKIPS if str(sf).lower() in ("inf", "infinity") else int(sf)
    if "multiples_rule" in gen:
        settings.multiples_rule = bool(gen["multiples_rule"])
    return settings
