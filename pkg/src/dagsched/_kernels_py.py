"""Pure-Python evaluation and sorting kernels (fallback backend).

dagsched._kernels (the compiled backend) mirrors this module exactly:
identical arithmetic in identical order, so the two backends produce
bit-identical floating point results. Keep the loop structure in the two
files in sync; tests compare their outputs with == on every field.
"""

from __future__ import annotations


def prepare_instance(
    n, m, heights, exec_time, pred_ptr, pred_ids, pred_vol,
    proc_failure, link_failure, link_delay,
):
    """Repack the instance arrays into plain lists for fast scalar access."""
    heights = [int(h) for h in heights]
    maxh = max(heights) if heights else 0
    return (
        int(n),
        int(m),
        heights,
        [[float(x) for x in row] for row in exec_time],
        [int(x) for x in pred_ptr],
        [int(x) for x in pred_ids],
        [float(x) for x in pred_vol],
        [float(x) for x in proc_failure],
        [[float(x) for x in row] for row in link_failure],
        [[float(x) for x in row] for row in link_delay],
        maxh,
    )


def evaluate_schedule(ctx, proc_lists):
    """Makespan, reliability cost and per-task timing for one schedule.

    proc_lists is a tuple of per-processor task sequences, each ordered by
    non-decreasing height. Tasks are processed in ascending height, walking
    every list in step, which is a valid order because a task's graph
    predecessors have strictly smaller heights and its in-list predecessor
    sits at an earlier position of the same list.

    A task starts at the larger of its data-ready time (max over predecessors
    of predecessor finish plus volume times link delay; zero delay on the
    same processor) and the finish time of the previous task on its list.
    There is no backfilling into idle gaps and finish times are never
    truncated by deadlines.

    The reliability cost sums, in ascending task order, the assigned
    processor's failure rate times the execution time, plus for every
    predecessor the connecting link's failure rate times volume times delay.

    Returns (makespan, rc, start, finish, earliest, proc_of).
    """
    (n, m, heights, exec_time, pred_ptr, pred_ids, pred_vol,
     proc_fail, link_fail, link_delay, maxh) = ctx

    order: list[int] = []
    ptr = [0]
    for lst in proc_lists:
        order.extend(lst)
        ptr.append(len(order))
    if len(order) != n:
        raise ValueError("schedule does not place every task exactly once")

    proc_of = [0] * n
    for j in range(m):
        for k in range(ptr[j], ptr[j + 1]):
            proc_of[order[k]] = j

    start = [0.0] * n
    finish = [0.0] * n
    earliest = [0.0] * n
    clock = [0.0] * m
    cur = ptr[:m]

    for h in range(maxh + 1):
        for j in range(m):
            k = cur[j]
            end = ptr[j + 1]
            while k < end:
                i = order[k]
                if heights[i] != h:
                    break
                e = 0.0
                for idx in range(pred_ptr[i], pred_ptr[i + 1]):
                    p = pred_ids[idx]
                    t = finish[p] + pred_vol[idx] * link_delay[proc_of[p]][j]
                    if t > e:
                        e = t
                s = e if e > clock[j] else clock[j]
                earliest[i] = e
                start[i] = s
                f = s + exec_time[i][j]
                finish[i] = f
                clock[j] = f
                k += 1
            cur[j] = k

    makespan = 0.0
    for f in finish:
        if f > makespan:
            makespan = f

    rc = 0.0
    for i in range(n):
        j = proc_of[i]
        rc += proc_fail[j] * exec_time[i][j]
        for idx in range(pred_ptr[i], pred_ptr[i + 1]):
            p = pred_ids[idx]
            pk = proc_of[p]
            rc += link_fail[pk][j] * pred_vol[idx] * link_delay[pk][j]

    return makespan, rc, start, finish, earliest, proc_of


def nondominated_ranks(objectives):
    """Front index of every point under two-objective minimization.

    Classic domination-count sort: count, for each point, how many points
    dominate it and remember whom it dominates; points with count zero form
    front 0, removing a front decrements the counts of the points it
    dominates, and the next front is whatever drops to zero.
    """
    pairs = [(float(a), float(b)) for a, b in objectives]
    n = len(pairs)
    dominated_by: list[list[int]] = [[] for _ in range(n)]
    counts = [0] * n
    rank = [-1] * n
    current: list[int] = []
    for p in range(n):
        a0, a1 = pairs[p]
        cnt = 0
        dom = dominated_by[p]
        for q in range(n):
            if q == p:
                continue
            b0, b1 = pairs[q]
            if a0 <= b0 and a1 <= b1 and (a0 < b0 or a1 < b1):
                dom.append(q)
            elif b0 <= a0 and b1 <= a1 and (b0 < a0 or b1 < a1):
                cnt += 1
        counts[p] = cnt
        if cnt == 0:
            rank[p] = 0
            current.append(p)
    level = 0
    while current:
        nxt: list[int] = []
        for p in current:
            for q in dominated_by[p]:
                counts[q] -= 1
                if counts[q] == 0:
                    rank[q] = level + 1
                    nxt.append(q)
        level += 1
        current = nxt
    return rank
