"""Schedules and their evaluation.

A schedule assigns every task to exactly one processor and fixes the
execution order on each processor. The encoding is a tuple of per-processor
task sequences; a schedule is legal when the sequences partition the task set
and each sequence is non-decreasing in height, where the height of a task is
the length of its longest predecessor chain. Height order implies precedence
feasibility, so legality is cheap to check and is preserved by the variation
operators in dagsched.nsga2.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import chain
from pathlib import Path
from typing import NamedTuple

import numpy as np

from . import _backend
from .instance import Instance, TaskGraph, validate


class IllegalScheduleError(ValueError):
    """A schedule violates the partition or height-order invariant."""


class ObjectiveVector(NamedTuple):
    """One point in objective space; both objectives are minimized."""

    makespan: float
    reliability_cost: float


@dataclass(frozen=True)
class Schedule:
    """Per-processor ordered task lists; immutable and hashable."""

    proc_lists: tuple[tuple[int, ...], ...]

    @classmethod
    def from_lists(cls, lists) -> "Schedule":
        return cls(tuple(tuple(int(t) for t in lst) for lst in lists))

    @property
    def n_procs(self) -> int:
        return len(self.proc_lists)

    def tasks(self):
        """All task indices in list order (processor 0 first)."""
        return chain.from_iterable(self.proc_lists)

    def assignment(self, n_tasks: int) -> list[int]:
        """proc_of[i] for every task; requires a partition-complete schedule."""
        proc_of = [-1] * n_tasks
        for j, lst in enumerate(self.proc_lists):
            for t in lst:
                proc_of[t] = j
        if any(p < 0 for p in proc_of):
            raise IllegalScheduleError("schedule does not place every task")
        return proc_of


@dataclass(eq=False)
class Timing:
    """Per-task start/finish times and data-ready (earliest) times."""

    start: np.ndarray
    finish: np.ndarray
    earliest: np.ndarray


def compute_heights(graph: TaskGraph) -> list[int]:
    """Longest predecessor chain length per task; sources get height 0.

    Raises CyclicGraphError (from the topological sort) on a cyclic graph.
    """
    heights = [0] * graph.n_tasks
    for i in graph.topological_order():
        ps = graph.predecessors[i]
        if ps:
            heights[i] = 1 + max(heights[p] for p in ps)
    return heights


def schedule_violations(
    schedule: Schedule, graph: TaskGraph, heights: list[int] | None = None
) -> list[str]:
    """Explain every way the schedule breaks the legality invariants."""
    out: list[str] = []
    n = graph.n_tasks
    counts = [0] * n
    for j, lst in enumerate(schedule.proc_lists):
        for t in lst:
            if not 0 <= t < n:
                out.append(f"processor {j}: task index {t} out of range")
            else:
                counts[t] += 1
    missing = [i for i, c in enumerate(counts) if c == 0]
    duplicated = [i for i, c in enumerate(counts) if c > 1]
    if missing:
        out.append(f"tasks never scheduled: {missing}")
    if duplicated:
        out.append(f"tasks scheduled more than once: {duplicated}")
    if out:
        return out
    if heights is None:
        heights = compute_heights(graph)
    for j, lst in enumerate(schedule.proc_lists):
        hs = [heights[t] for t in lst]
        if any(a > b for a, b in zip(hs, hs[1:])):
            out.append(f"processor {j}: task heights are not non-decreasing")
    return out


def is_legal(
    schedule: Schedule, graph: TaskGraph, heights: list[int] | None = None
) -> bool:
    """True when the schedule partitions the tasks in height order."""
    return not schedule_violations(schedule, graph, heights)


def random_schedule(instance: Instance, rng: np.random.Generator) -> Schedule:
    """Draw a random legal schedule.

    Tasks are grouped by height; each group is shuffled uniformly and every
    task in it is appended to an independently, uniformly chosen processor.
    Random partition (rather than a round-robin deal) matters: it is the only
    source of per-height load imbalance, because crossover exchanges whole
    per-processor suffixes and mutation swaps equal-height tasks, both of
    which preserve each height group's processor counts. Consumes, per height
    group in ascending order: one permutation, then one processor draw per
    task.
    """
    graph = instance.graph
    m = instance.platform.n_procs
    heights = compute_heights(graph)
    maxh = max(heights)
    groups: list[list[int]] = [[] for _ in range(maxh + 1)]
    for t in range(graph.n_tasks):
        groups[heights[t]].append(t)
    lists: list[list[int]] = [[] for _ in range(m)]
    for group in groups:
        perm = rng.permutation(len(group))
        procs = rng.integers(0, m, size=len(group))
        for gi, j in zip(perm, procs):
            lists[j].append(group[gi])
    return Schedule(tuple(tuple(lst) for lst in lists))


class Evaluator:
    """Caches per-instance arrays and dispatches to the active kernel backend.

    Safe to share across threads: evaluation is pure and the cached context
    is read-only.
    """

    def __init__(self, instance: Instance):
        problems = validate(instance)
        if problems:
            raise ValueError("invalid instance: " + "; ".join(problems))
        self.instance = instance
        g, p = instance.graph, instance.platform
        self.heights = compute_heights(g)
        n = g.n_tasks
        pred_ptr = np.zeros(n + 1, dtype=np.intc)
        pred_ids: list[int] = []
        pred_vol: list[float] = []
        for i in range(n):
            for q in g.predecessors[i]:
                pred_ids.append(q)
                pred_vol.append(float(g.data_volume[q, i]))
            pred_ptr[i + 1] = len(pred_ids)
        self._ctx = _backend.prepare_instance(
            n,
            p.n_procs,
            np.asarray(self.heights, dtype=np.intc),
            np.ascontiguousarray(p.exec_time, dtype=float),
            pred_ptr,
            np.asarray(pred_ids, dtype=np.intc),
            np.asarray(pred_vol, dtype=float),
            np.ascontiguousarray(p.proc_failure, dtype=float),
            np.ascontiguousarray(p.link_failure, dtype=float),
            np.ascontiguousarray(p.link_delay, dtype=float),
        )

    def _require_legal(self, schedule: Schedule) -> None:
        problems = schedule_violations(schedule, self.instance.graph, self.heights)
        if problems:
            raise IllegalScheduleError("; ".join(problems))
        if schedule.n_procs != self.instance.platform.n_procs:
            raise IllegalScheduleError(
                f"schedule has {schedule.n_procs} processor lists, "
                f"expected {self.instance.platform.n_procs}"
            )

    def is_legal(self, schedule: Schedule) -> bool:
        return (
            schedule.n_procs == self.instance.platform.n_procs
            and is_legal(schedule, self.instance.graph, self.heights)
        )

    def evaluate(self, schedule: Schedule) -> ObjectiveVector:
        """Both objectives for a legal schedule."""
        self._require_legal(schedule)
        mk, rc, *_ = _backend.evaluate_schedule(self._ctx, schedule.proc_lists)
        return ObjectiveVector(mk, rc)

    def timing(self, schedule: Schedule) -> tuple[ObjectiveVector, Timing, list[int]]:
        """Objectives plus per-task timing and the processor assignment."""
        self._require_legal(schedule)
        mk, rc, start, finish, earliest, proc_of = _backend.evaluate_schedule(
            self._ctx, schedule.proc_lists
        )
        timing = Timing(
            np.asarray(start, dtype=float),
            np.asarray(finish, dtype=float),
            np.asarray(earliest, dtype=float),
        )
        return ObjectiveVector(mk, rc), timing, [int(x) for x in proc_of]


def evaluate(schedule: Schedule, instance: Instance) -> ObjectiveVector:
    """Makespan and reliability cost of a legal schedule."""
    return Evaluator(instance).evaluate(schedule)


def evaluate_makespan(schedule: Schedule, instance: Instance) -> tuple[float, Timing]:
    """Makespan plus the per-task timing that produced it.

    Start times follow the list-scheduling recurrence: a task begins at the
    larger of its data-ready time and the finish of its predecessor on the
    same list. Finish times are start + execution time, never truncated by
    deadlines; deadline violations are reported by deadline_misses instead.
    """
    vec, timing, _ = Evaluator(instance).timing(schedule)
    return vec.makespan, timing


def evaluate_reliability_cost(schedule: Schedule, instance: Instance) -> float:
    """Expected failure exposure of a legal schedule.

    Sums processor failure rate times execution time for every task on its
    assigned processor, plus link failure rate times data volume times link
    delay for every edge whose endpoints sit on different processors.
    """
    return Evaluator(instance).evaluate(schedule).reliability_cost


def deadline_misses(timing: Timing, deadlines) -> tuple[int, list[bool]]:
    """Which tasks finish strictly after their deadline."""
    d = np.asarray(deadlines, dtype=float)
    if d.shape != timing.finish.shape:
        raise ValueError(
            f"deadlines has shape {d.shape}, expected {timing.finish.shape}"
        )
    flags = [bool(f > di) for f, di in zip(timing.finish, d)]
    return sum(flags), flags


def schedule_to_text(schedule: Schedule, sep: str = "\n") -> str:
    """One processor per line (or sep-separated field), tasks comma-separated."""
    parts = [",".join(str(t) for t in lst) for lst in schedule.proc_lists]
    if sep == "\n":
        return "\n".join(parts) + "\n"
    return sep.join(parts)


def schedule_from_text(text: str, sep: str = "\n") -> Schedule:
    """Inverse of schedule_to_text; blank fields are empty processors."""
    if sep == "\n" and text.endswith("\n"):
        text = text[:-1]
    lists = []
    for j, part in enumerate(text.split(sep)):
        part = part.strip()
        if not part:
            lists.append(())
            continue
        try:
            lists.append(tuple(int(tok) for tok in part.split(",")))
        except ValueError:
            raise ValueError(
                f"processor {j}: cannot parse task list {part!r}"
            ) from None
    return Schedule(tuple(lists))


def save_schedule(schedule: Schedule, path) -> None:
    Path(path).write_text(schedule_to_text(schedule))


def load_schedule(path) -> Schedule:
    return schedule_from_text(Path(path).read_text())
