import pytest

from skipsim.taskmodel import TaskSpec, validate_task_set

# Classic five-task demo set: u_tot = 23/20, hyperperiod 60.
FIVE_TASK_PARAMS = [(30, 3), (20, 4), (15, 1), (12, 7), (10, 2)]


def five_task_set(sf=2):
    specs = [
        TaskSpec(id=i + 1, period=p, wcet=c, skip_factor=sf)
        for i, (p, c) in enumerate(FIVE_TASK_PARAMS)
    ]
    return validate_task_set(specs)


@pytest.fixture
def table_set():
    return five_task_set()
