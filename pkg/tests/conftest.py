"""Shared hand-built instances with hand-derived expected values.

The numbers in these fixtures were worked out on paper from the timing
recurrence and the failure-cost sum; tests assert them as frozen constants.
"""

import numpy as np
import pytest

from dagsched import Instance, Platform, TaskGraph


def make_instance(
    n_tasks,
    preds,
    exec_time,
    volumes=None,
    proc_failure=None,
    link_failure=None,
    link_delay=None,
    deadlines=None,
):
    """Build an Instance from plain lists; volumes maps (src, dst) -> amount."""
    exec_time = np.asarray(exec_time, dtype=float)
    m = exec_time.shape[1]
    vol = np.zeros((n_tasks, n_tasks))
    for (k, l), v in (volumes or {}).items():
        vol[k, l] = v
    if volumes is None:
        for l, ps in enumerate(preds):
            for k in ps:
                vol[k, l] = 1.0
    graph = TaskGraph(n_tasks, tuple(tuple(ps) for ps in preds), vol)
    if proc_failure is None:
        proc_failure = np.zeros(m)
    if link_failure is None:
        link_failure = np.zeros((m, m))
    if link_delay is None:
        link_delay = np.zeros((m, m))
    platform = Platform(m, exec_time, proc_failure, link_failure, link_delay)
    return Instance(graph, platform, deadlines)


@pytest.fixture
def single_task_instance():
    # exec 8 on the only processor, failure rate 1e-5 -> RC = 8e-5
    return make_instance(
        1,
        [()],
        [[8.0]],
        proc_failure=[1e-5],
    )


@pytest.fixture
def chain2_instance():
    # 0 -> 1, volume 2. Split across processors: finish(0) = 3 on proc 0,
    # earliest(1) = 3 + 2 * 0.5 = 4, finish(1) = 4 + 4 = 8 -> makespan 8.
    # RC = 1e-5*3 + 2e-5*4 + 3e-6*2*0.5 = 1.13e-4.
    # Both on proc 0: makespan 3 + 10 = 13, RC = 1e-5*(3 + 10) = 1.3e-4.
    return make_instance(
        2,
        [(), (0,)],
        [[3.0, 10.0], [10.0, 4.0]],
        volumes={(0, 1): 2.0},
        proc_failure=[1e-5, 2e-5],
        link_failure=[[0.0, 3e-6], [3e-6, 0.0]],
        link_delay=[[0.0, 0.5], [0.5, 0.0]],
    )


@pytest.fixture
def diamond_instance():
    # 0 -> {1, 2} -> 3; heights [0, 1, 1, 2].
    # Schedule ((0, 1), (2, 3)):
    #   task 0 on p0: start 0, finish 2
    #   task 1 on p0: earliest 2 (same proc), start 2, finish 6
    #   task 2 on p1: earliest 2 + 2*0.5 = 3, start 3, finish 5
    #   task 3 on p1: earliest max(6 + 3*0.5, 5) = 7.5, start 7.5, finish 8.5
    # makespan 8.5
    # RC = (2 + 4)*1e-5 + (2 + 1)*2e-5 + 1e-6*2*0.5 + 1e-6*3*0.5 = 1.225e-4
    return make_instance(
        4,
        [(), (0,), (0,), (1, 2)],
        [[2.0, 3.0], [4.0, 5.0], [1.0, 2.0], [3.0, 1.0]],
        volumes={(0, 1): 1.0, (0, 2): 2.0, (1, 3): 3.0, (2, 3): 4.0},
        proc_failure=[1e-5, 2e-5],
        link_failure=[[0.0, 1e-6], [2e-6, 0.0]],
        link_delay=[[0.0, 0.5], [0.25, 0.0]],
    )


@pytest.fixture
def nogap_instance():
    # 0 -> 1; task 2 independent. On list (0, 2) task 2 waits for task 0
    # even though it has no predecessors: start(2) = finish(0) = 5.
    return make_instance(
        3,
        [(), (0,), ()],
        [[5.0, 5.0], [1.0, 1.0], [1.0, 1.0]],
        volumes={(0, 1): 1.0},
        link_delay=[[0.0, 0.5], [0.5, 0.0]],
    )
