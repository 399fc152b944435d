import pytest

from skipsim.config import load_taskset
from skipsim.errors import ConfigError
from skipsim.rational import rat
from skipsim.workload import GenConfig, format_taskset, generate_task_set


def test_deterministic_in_seed():
    a = generate_task_set(GenConfig(n_tasks=5, seed=77))
    b = generate_task_set(GenConfig(n_tasks=5, seed=77))
    assert a == b
    c = generate_task_set(GenConfig(n_tasks=5, seed=78))
    assert a != c


def test_multiples_rule():
    for seed in range(40):
        ts = generate_task_set(GenConfig(n_tasks=6, seed=seed))
        first = ts.tasks[0].period
        for t in ts.tasks[1:]:
            assert t.period % first == 0
            assert t.period <= 100


def test_bounds_and_clamp():
    for seed in range(60):
        ts = generate_task_set(GenConfig(n_tasks=4, seed=seed))
        for t in ts.tasks:
            assert 3 <= t.period <= 100
            assert 1 <= t.wcet <= min(15, t.period)


def test_multiples_rule_off():
    ts = generate_task_set(GenConfig(n_tasks=8, seed=5, multiples_rule=False))
    assert len(ts.tasks) == 8


def test_n_outside_range_rejected():
    with pytest.raises(ConfigError):
        generate_task_set(GenConfig(n_tasks=1, seed=0))
    with pytest.raises(ConfigError):
        generate_task_set(GenConfig(n_tasks=11, seed=0))
    # override allows it
    ts = generate_task_set(GenConfig(n_tasks=1, seed=0, allow_any_n=True))
    assert len(ts.tasks) == 1


def test_first_period_mean():
    total = 0
    n = 10_000
    for seed in range(n):
        ts = generate_task_set(GenConfig(n_tasks=2, seed=seed))
        total += ts.tasks[0].period
    mean = total / n
    assert abs(mean - 51.5) / 51.5 < 0.05


def test_format_roundtrip(tmp_path):
    ts = generate_task_set(GenConfig(n_tasks=4, seed=9, bcet_fraction=rat(1, 2)))
    path = tmp_path / "set.txt"
    path.write_text(format_taskset(ts))
    loaded = load_taskset(path)
    assert [(t.period, t.wcet, t.skip_factor) for t in loaded.tasks] == [
        (t.period, t.wcet, t.skip_factor) for t in ts.tasks
    ]
