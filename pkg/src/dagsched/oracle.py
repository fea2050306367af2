"""Exhaustive ground truth for small instances.

Enumerates every legal schedule of a guarded-size instance, scores each with
an evaluator written independently of the engine's kernels, and keeps the
exact Pareto front. Deliberately different formulations are used on purpose:
makespan comes from a ready-list simulation that repeatedly launches the head
task of any processor whose predecessors have all finished, and the
reliability cost is assembled from the one-hot assignment matrix, so a bug in
the engine's recurrence cannot hide in a copy of itself.
"""

from __future__ import annotations

import csv
import itertools
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .instance import Instance
from .nsga2 import dominates
from .schedule import IllegalScheduleError, ObjectiveVector, Schedule, compute_heights

# Enumeration is Theta(assignments x orderings); these bounds keep the worst
# case (an edgeless graph, where every within-height permutation is distinct)
# below ~2e6 schedules.
MAX_ORACLE_TASKS = 8
MAX_ORACLE_PROCS = 3

REL_MATCH_TOL = 1e-9


class OracleSizeError(ValueError):
    """Instance exceeds the exhaustive-enumeration guard."""


@dataclass
class ExactFront:
    """Mutually non-dominated objective vectors with one witness schedule
    each, sorted by makespan ascending."""

    points: list[ObjectiveVector]
    witnesses: list[Schedule]


def _check_size(instance: Instance) -> None:
    n, m = instance.n_tasks, instance.n_procs
    if n > MAX_ORACLE_TASKS or m > MAX_ORACLE_PROCS:
        raise OracleSizeError(
            f"instance has {n} tasks and {m} processors; the oracle is "
            f"guarded at {MAX_ORACLE_TASKS} tasks and {MAX_ORACLE_PROCS} "
            "processors"
        )


def enumerate_legal_schedules(instance: Instance):
    """Yield every legal schedule exactly once.

    Every assignment of tasks to processors is crossed with every
    per-processor ordering that is non-decreasing in height; within one
    height tasks commute, so the orderings per processor are the products of
    within-height permutations.
    """
    _check_size(instance)
    n, m = instance.n_tasks, instance.n_procs
    heights = compute_heights(instance.graph)
    maxh = max(heights)
    groups: list[list[int]] = [[] for _ in range(maxh + 1)]
    for t in range(n):
        groups[heights[t]].append(t)
    for assign in itertools.product(range(m), repeat=n):
        per_proc_orderings = []
        for j in range(m):
            blocks = []
            for group in groups:
                mine = tuple(t for t in group if assign[t] == j)
                blocks.append(list(itertools.permutations(mine)))
            orderings = [
                tuple(itertools.chain.from_iterable(combo))
                for combo in itertools.product(*blocks)
            ]
            per_proc_orderings.append(orderings)
        for lists in itertools.product(*per_proc_orderings):
            yield Schedule(tuple(lists))


def oracle_objectives(schedule: Schedule, instance: Instance) -> tuple[float, float]:
    """Score one legal schedule; independent twin of the engine's evaluator."""
    g, plat = instance.graph, instance.platform
    n, m = g.n_tasks, plat.n_procs
    exec_time = plat.exec_time
    delay = plat.link_delay
    volume = g.data_volume
    lists = schedule.proc_lists

    proc_of = schedule.assignment(n)
    position = [0] * m
    clock = [0.0] * m
    finish: dict[int, float] = {}
    while len(finish) < n:
        progressed = False
        for j in range(m):
            if position[j] >= len(lists[j]):
                continue
            t = lists[j][position[j]]
            preds = g.predecessors[t]
            if any(p not in finish for p in preds):
                continue
            ready = 0.0
            for p in preds:
                arrival = finish[p] + float(volume[p, t]) * float(delay[proc_of[p], j])
                if arrival > ready:
                    ready = arrival
            begin = max(ready, clock[j])
            done = begin + float(exec_time[t, j])
            finish[t] = done
            clock[j] = done
            position[j] += 1
            progressed = True
        if not progressed:
            raise IllegalScheduleError(
                "schedule deadlocks: circular wait between processor queues"
            )
    makespan = max(finish.values())

    one_hot = np.zeros((n, m))
    one_hot[np.arange(n), proc_of] = 1.0
    rc = 0.0
    for j in range(m):
        rc += float(plat.proc_failure[j]) * float(one_hot[:, j] @ exec_time[:, j])
    for k in range(m):
        moved = one_hot[:, k] @ volume  # volume leaving processor k, per receiver
        for b in range(m):
            rc += float(plat.link_failure[k, b]) * float(delay[k, b]) * float(
                moved @ one_hot[:, b]
            )
    return makespan, rc


def exact_pareto_front(instance: Instance) -> ExactFront:
    """Exhaustive Pareto front over all legal schedules.

    Points are mutually non-dominated and every legal schedule's vector is
    weakly dominated by some point. The witness for each point is the first
    schedule in enumeration order that attains it.
    """
    _check_size(instance)
    front: list[tuple[ObjectiveVector, Schedule]] = []
    for s in enumerate_legal_schedules(instance):
        mk, rc = oracle_objectives(s, instance)
        v = ObjectiveVector(mk, rc)
        if any(e.makespan <= v.makespan and e.reliability_cost <= v.reliability_cost
               for e, _ in front):
            continue
        front = [(e, w) for e, w in front if not dominates(v, e)]
        front.append((v, s))
    front.sort(key=lambda pair: pair[0])
    return ExactFront([e for e, _ in front], [w for _, w in front])


def _matches(a: ObjectiveVector, b: ObjectiveVector) -> bool:
    return math.isclose(
        a.makespan, b.makespan, rel_tol=REL_MATCH_TOL
    ) and math.isclose(a.reliability_cost, b.reliability_cost, rel_tol=REL_MATCH_TOL)


def _scales(points: list[ObjectiveVector]) -> tuple[float, float]:
    s0 = max(abs(p.makespan) for p in points) or 1.0
    s1 = max(abs(p.reliability_cost) for p in points) or 1.0
    return s0, s1


def _normalized_distance(f: ObjectiveVector, e: ObjectiveVector, scales) -> float:
    return max(
        abs(f.makespan - e.makespan) / scales[0],
        abs(f.reliability_cost - e.reliability_cost) / scales[1],
    )


def front_distance(found, exact: ExactFront) -> tuple[float, float]:
    """(coverage, deviation) of a found front against the exact one.

    Coverage is the fraction of exact points matched componentwise within
    1e-9 relative tolerance. Deviation is the largest, over found points, of
    the normalized distance to the nearest exact point, where each objective
    is scaled by its largest magnitude on the exact front; it is 0 exactly
    when every found point lies on the exact front.
    """
    if not exact.points:
        raise ValueError("exact front must be non-empty")
    found = list(found)
    matched = sum(
        1 for e in exact.points if any(_matches(f, e) for f in found)
    )
    coverage = matched / len(exact.points)
    scales = _scales(exact.points)
    deviation = 0.0
    for f in found:
        d = min(_normalized_distance(f, e, scales) for e in exact.points)
        if d > deviation:
            deviation = d
    return coverage, deviation


def write_front_report(path, found, exact: ExactFront) -> None:
    """Per-exact-point comparison CSV: matched flag, nearest found point and
    its normalized distance."""
    found = list(found)
    scales = _scales(exact.points)
    rows = []
    for e in exact.points:
        matched = any(_matches(f, e) for f in found)
        if found:
            nearest = min(found, key=lambda f: _normalized_distance(f, e, scales))
            dev = _normalized_distance(nearest, e, scales)
            rows.append(
                [
                    repr(e.makespan),
                    f"{e.reliability_cost:.8e}",
                    str(matched).lower(),
                    repr(nearest.makespan),
                    f"{nearest.reliability_cost:.8e}",
                    repr(dev),
                ]
            )
        else:
            rows.append(
                [repr(e.makespan), f"{e.reliability_cost:.8e}", "false", "", "", ""]
            )
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(
            [
                "exact_makespan",
                "exact_reliability_cost",
                "matched",
                "nearest_makespan",
                "nearest_reliability_cost",
                "deviation",
            ]
        )
        writer.writerows(rows)
