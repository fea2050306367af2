"""Compare the compiled kernel against the pure-Python fallback.

Times the two hot paths (schedule evaluation and non-dominated ranking) on a
few sizes and prints the per-call cost and speedup. Run from a checkout with
the package installed:

    python3 benchmarks/bench_kernels.py [--repeats N]
"""

import argparse
import time

import numpy as np

from dagsched import Evaluator, generate_instance, random_schedule
from dagsched import _kernels_py as pure

try:
    from dagsched import _kernels as compiled
except ImportError:
    compiled = None


def build_context(backend, instance):
    ev = Evaluator(instance)
    g, p = instance.graph, instance.platform
    n = g.n_tasks
    pred_ptr = np.zeros(n + 1, dtype=np.intc)
    pred_ids, pred_vol = [], []
    for i in range(n):
        for q in g.predecessors[i]:
            pred_ids.append(q)
            pred_vol.append(float(g.data_volume[q, i]))
        pred_ptr[i + 1] = len(pred_ids)
    return backend.prepare_instance(
        n,
        p.n_procs,
        np.asarray(ev.heights, dtype=np.intc),
        np.ascontiguousarray(p.exec_time, dtype=float),
        pred_ptr,
        np.asarray(pred_ids, dtype=np.intc),
        np.asarray(pred_vol, dtype=float),
        np.ascontiguousarray(p.proc_failure, dtype=float),
        np.ascontiguousarray(p.link_failure, dtype=float),
        np.ascontiguousarray(p.link_delay, dtype=float),
    )


def time_per_call(fn, args_list, repeats):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for args in args_list:
            fn(*args)
        best = min(best, (time.perf_counter() - t0) / len(args_list))
    return best


def bench_evaluate(repeats):
    print("evaluate_schedule (seconds per call)")
    print(f"{'size':>16} {'pure':>12} {'compiled':>12} {'speedup':>8}")
    rng = np.random.default_rng(0)
    for n, m in ((10, 2), (50, 4), (200, 8)):
        inst = generate_instance(n, m, 0.5, seed=1)
        schedules = [random_schedule(inst, rng).proc_lists for _ in range(50)]
        ctx_pure = build_context(pure, inst)
        args = [(ctx_pure, s) for s in schedules]
        t_pure = time_per_call(pure.evaluate_schedule, args, repeats)
        row = f"{f'{n}x{m}':>16} {t_pure:>12.3e}"
        if compiled is not None:
            ctx_comp = build_context(compiled, inst)
            args = [(ctx_comp, s) for s in schedules]
            t_comp = time_per_call(compiled.evaluate_schedule, args, repeats)
            row += f" {t_comp:>12.3e} {t_pure / t_comp:>7.1f}x"
        print(row)


def bench_sort(repeats):
    print("\nnondominated_ranks (seconds per call)")
    print(f"{'points':>16} {'pure':>12} {'compiled':>12} {'speedup':>8}")
    rng = np.random.default_rng(2)
    for size in (20, 100, 400):
        pops = [
            [tuple(rng.random(2)) for _ in range(size)] for _ in range(20)
        ]
        args = [(objs,) for objs in pops]
        t_pure = time_per_call(pure.nondominated_ranks, args, repeats)
        row = f"{size:>16} {t_pure:>12.3e}"
        if compiled is not None:
            t_comp = time_per_call(compiled.nondominated_ranks, args, repeats)
            row += f" {t_comp:>12.3e} {t_pure / t_comp:>7.1f}x"
        print(row)


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeats", type=int, default=5,
                        help="timing repetitions, best is kept (default 5)")
    args = parser.parse_args()
    if compiled is None:
        print("compiled kernel not available; timing the pure backend only\n")
    bench_evaluate(args.repeats)
    bench_sort(args.repeats)


if __name__ == "__main__":
    main()
