# cython: language_level=3
# cython: boundscheck=False, wraparound=False, initializedcheck=False, cdivision=True
"""Compiled evaluation and sorting kernels.

Arithmetic twin of dagsched._kernels_py: same loops in the same order, so
results are bit-identical to the pure-Python backend. The semantics are
documented there; this file only changes the execution speed. Both kernels
release the GIL over their inner loops, which lets thread pools evaluate
offspring in parallel.
"""

import numpy as np


def prepare_instance(
    n, m, heights, exec_time, pred_ptr, pred_ids, pred_vol,
    proc_failure, link_failure, link_delay,
):
    """Repack the instance arrays into typed, C-contiguous buffers."""
    heights = np.ascontiguousarray(heights, dtype=np.intc)
    maxh = int(heights.max()) if heights.shape[0] else 0
    return (
        int(n),
        int(m),
        heights,
        np.ascontiguousarray(exec_time, dtype=np.float64),
        np.ascontiguousarray(pred_ptr, dtype=np.intc),
        np.ascontiguousarray(pred_ids, dtype=np.intc),
        np.ascontiguousarray(pred_vol, dtype=np.float64),
        np.ascontiguousarray(proc_failure, dtype=np.float64),
        np.ascontiguousarray(link_failure, dtype=np.float64),
        np.ascontiguousarray(link_delay, dtype=np.float64),
        maxh,
    )


def evaluate_schedule(ctx, proc_lists):
    """See dagsched._kernels_py.evaluate_schedule for the contract."""
    cdef int n = ctx[0]
    cdef int m = ctx[1]
    cdef int maxh = ctx[10]
    cdef int[::1] heights = ctx[2]
    cdef double[:, ::1] exec_time = ctx[3]
    cdef int[::1] pred_ptr = ctx[4]
    cdef int[::1] pred_ids = ctx[5]
    cdef double[::1] pred_vol = ctx[6]
    cdef double[::1] proc_fail = ctx[7]
    cdef double[:, ::1] link_fail = ctx[8]
    cdef double[:, ::1] link_delay = ctx[9]

    order_arr = np.empty(n, dtype=np.intc)
    ptr_arr = np.empty(m + 1, dtype=np.intc)
    cdef int[::1] order = order_arr
    cdef int[::1] ptr = ptr_arr
    cdef int pos = 0
    cdef int j = 0
    cdef int ti
    ptr[0] = 0
    for lst in proc_lists:
        for t in lst:
            ti = t
            if pos >= n or ti < 0 or ti >= n:
                raise ValueError("schedule does not place every task exactly once")
            order[pos] = ti
            pos += 1
        j += 1
        ptr[j] = pos
    if pos != n or j != m:
        raise ValueError("schedule does not place every task exactly once")

    start_arr = np.zeros(n, dtype=np.float64)
    finish_arr = np.zeros(n, dtype=np.float64)
    earliest_arr = np.zeros(n, dtype=np.float64)
    proc_arr = np.zeros(n, dtype=np.intc)
    clock_arr = np.zeros(m, dtype=np.float64)
    cur_arr = np.empty(m, dtype=np.intc)
    cdef double[::1] start = start_arr
    cdef double[::1] finish = finish_arr
    cdef double[::1] earliest = earliest_arr
    cdef int[::1] proc_of = proc_arr
    cdef double[::1] clock = clock_arr
    cdef int[::1] cur = cur_arr

    cdef int h, k, end, i, idx, p, pk
    cdef double e, t_ready, s, f, makespan, rc

    with nogil:
        for j in range(m):
            for k in range(ptr[j], ptr[j + 1]):
                proc_of[order[k]] = j
            cur[j] = ptr[j]

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
                        t_ready = finish[p] + pred_vol[idx] * link_delay[proc_of[p], j]
                        if t_ready > e:
                            e = t_ready
                    s = e if e > clock[j] else clock[j]
                    earliest[i] = e
                    start[i] = s
                    f = s + exec_time[i, j]
                    finish[i] = f
                    clock[j] = f
                    k += 1
                cur[j] = k

        makespan = 0.0
        for i in range(n):
            if finish[i] > makespan:
                makespan = finish[i]

        rc = 0.0
        for i in range(n):
            j = proc_of[i]
            rc += proc_fail[j] * exec_time[i, j]
            for idx in range(pred_ptr[i], pred_ptr[i + 1]):
                p = pred_ids[idx]
                pk = proc_of[p]
                rc += link_fail[pk, j] * pred_vol[idx] * link_delay[pk, j]

    return makespan, rc, start_arr, finish_arr, earliest_arr, proc_arr


def nondominated_ranks(objectives):
    """See dagsched._kernels_py.nondominated_ranks for the contract."""
    obj_arr = np.ascontiguousarray(objectives, dtype=np.float64)
    if obj_arr.ndim != 2 or obj_arr.shape[1] != 2:
        raise ValueError("objectives must be an (n, 2) array-like")
    cdef double[:, ::1] o = obj_arr
    cdef int n = o.shape[0]
    if n == 0:
        return []

    dom_arr = np.zeros((n, n), dtype=np.uint8)
    counts_arr = np.zeros(n, dtype=np.intc)
    rank_arr = np.full(n, -1, dtype=np.intc)
    cur_arr = np.empty(n, dtype=np.intc)
    nxt_arr = np.empty(n, dtype=np.intc)
    cdef unsigned char[:, ::1] dom = dom_arr
    cdef int[::1] counts = counts_arr
    cdef int[::1] rank = rank_arr
    cdef int[::1] current = cur_arr
    cdef int[::1] nxt = nxt_arr

    cdef int p, q, cnt, ncur, nnxt, level, ci, qi
    cdef double a0, a1, b0, b1

    with nogil:
        ncur = 0
        for p in range(n):
            a0 = o[p, 0]
            a1 = o[p, 1]
            cnt = 0
            for q in range(n):
                if q == p:
                    continue
                b0 = o[q, 0]
                b1 = o[q, 1]
                if a0 <= b0 and a1 <= b1 and (a0 < b0 or a1 < b1):
                    dom[p, q] = 1
                elif b0 <= a0 and b1 <= a1 and (b0 < a0 or b1 < a1):
                    cnt += 1
            counts[p] = cnt
            if cnt == 0:
                rank[p] = 0
                current[ncur] = p
                ncur += 1

        level = 0
        while ncur > 0:
            nnxt = 0
            for ci in range(ncur):
                p = current[ci]
                for qi in range(n):
                    if dom[p, qi]:
                        counts[qi] -= 1
                        if counts[qi] == 0:
                            rank[qi] = level + 1
                            nxt[nnxt] = qi
                            nnxt += 1
            level += 1
            for ci in range(nnxt):
                current[ci] = nxt[ci]
            ncur = nnxt

    return rank_arr.tolist()
