"""Command-line interface.

Subcommands: gen (random instance to file), solve (optimize an instance and
write front/stats CSVs), eval (score a schedule file against an instance),
oracle (compare the engine against the exhaustive front) and paper-case (the
two built-in study configurations). All outputs are written to a temp file
and renamed into place, so a crash never leaves a partial file, and repeated
runs with identical flags produce byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from dataclasses import dataclass
from pathlib import Path

from .instance import (
    DEFAULT_EXEC_MEAN,
    DEFAULT_LINK_DELAY_RANGE,
    DISTRIBUTIONS,
    InstanceFormatError,
    _atomic_write_text,
    generate_instance,
    load_instance,
    save_instance,
)
from .nsga2 import EvolutionConfig, FrontPoint, GenerationStats, run
from .oracle import (
    OracleSizeError,
    exact_pareto_front,
    front_distance,
    write_front_report,
)
from .schedule import (
    Evaluator,
    IllegalScheduleError,
    deadline_misses,
    load_schedule,
    schedule_to_text,
    schedule_violations,
)

DEFAULT_GENERATIONS = 100
DEFAULT_EPSILON = 0.5

# The two built-in study configurations: a small two-machine case run with
# both execution-time distributions, and a larger four-machine case.
PAPER_CASES = {
    "case1": {"n_tasks": 10, "n_procs": 2, "dists": ("normal", "exponential")},
    "case2": {"n_tasks": 50, "n_procs": 4, "dists": ("normal",)},
}
PAPER_ITERATIONS = (1, 5)


@dataclass(frozen=True)
class RunConfig:
    """Everything cmd_solve needs: where the instance lives, the evolution
    parameters, where outputs go and whether stats are emitted."""

    instance_path: Path
    evolution: EvolutionConfig
    output_dir: Path
    emit_stats: bool = True
    workers: int = 1


def front_csv(front: list[FrontPoint]) -> str:
    """Front rows as CSV text: makespan, reliability cost (9 significant
    digits, scientific), and the schedule with '|' between processors."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["makespan", "reliability_cost", "schedule"])
    for point in front:
        writer.writerow(
            [
                repr(point.objectives.makespan),
                f"{point.objectives.reliability_cost:.8e}",
                schedule_to_text(point.schedule, sep="|"),
            ]
        )
    return buf.getvalue()


def stats_csv(stats: list[GenerationStats]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(
        ["generation", "best_makespan", "best_rc", "mean_makespan", "mean_rc", "front0_size"]
    )
    for row in stats:
        writer.writerow(
            [
                row.generation,
                repr(row.best_makespan),
                f"{row.best_rc:.8e}",
                repr(row.mean_makespan),
                f"{row.mean_rc:.8e}",
                row.front0_size,
            ]
        )
    return buf.getvalue()


def solve_to_files(instance, config: RunConfig, quiet: bool = False):
    """Run the engine and write front.csv (and stats.csv) into output_dir."""
    result = run(instance, config.evolution, workers=config.workers)
    _atomic_write_text(config.output_dir / "front.csv", front_csv(result.front))
    if config.emit_stats:
        _atomic_write_text(config.output_dir / "stats.csv", stats_csv(result.stats))
    if not quiet:
        best = result.front[0]
        print(
            f"pop_size {config.evolution.pop_size}, "
            f"{config.evolution.generations} generations, "
            f"seed {config.evolution.seed}: front has {len(result.front)} points, "
            f"best makespan {best.objectives.makespan:.6g}, "
            f"best rc {min(p.objectives.reliability_cost for p in result.front):.6g}"
        )
    return result


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--seed", type=int, default=0, help="random seed (default 0)")
    parser.add_argument(
        "--out-dir", type=Path, default=Path("."), help="output directory (default .)"
    )
    parser.add_argument(
        "--quiet", action="store_true", help="suppress summary output"
    )


def _add_evolution_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--pop-size", type=int, default=None,
        help="population size (default: twice the task count)",
    )
    parser.add_argument(
        "--generations", type=int, default=DEFAULT_GENERATIONS,
        help=f"number of generations (default {DEFAULT_GENERATIONS})",
    )
    parser.add_argument("--pc", type=float, default=0.9, help="crossover probability")
    parser.add_argument("--pm", type=float, default=0.1, help="mutation probability")
    parser.add_argument(
        "--workers", type=int, default=1,
        help="evaluation threads (results do not depend on this)",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dagsched",
        description="Schedule dependent tasks onto unreliable heterogeneous "
        "processors, trading makespan against reliability cost.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("gen", help="generate a random instance")
    p_gen.add_argument("--tasks", type=int, required=True)
    p_gen.add_argument("--procs", type=int, required=True)
    p_gen.add_argument(
        "--epsilon", type=float, default=DEFAULT_EPSILON,
        help="edge probability of the random DAG (default 0.5)",
    )
    p_gen.add_argument("--dist", choices=DISTRIBUTIONS, default="exponential")
    p_gen.add_argument("--mean", type=float, default=DEFAULT_EXEC_MEAN)
    p_gen.add_argument(
        "--delay-min", type=float, default=DEFAULT_LINK_DELAY_RANGE[0],
        help="lower bound of the link delay range",
    )
    p_gen.add_argument(
        "--delay-max", type=float, default=DEFAULT_LINK_DELAY_RANGE[1],
        help="upper bound of the link delay range",
    )
    p_gen.add_argument(
        "--no-deadlines", action="store_true", help="omit generated deadlines"
    )
    p_gen.add_argument("--out", type=Path, required=True, help="instance file to write")
    _add_common(p_gen)
    p_gen.set_defaults(func=cmd_gen)

    p_solve = sub.add_parser("solve", help="optimize an instance")
    p_solve.add_argument("--instance", type=Path, required=True)
    _add_evolution_flags(p_solve)
    p_solve.add_argument(
        "--no-stats", action="store_true", help="do not write stats.csv"
    )
    _add_common(p_solve)
    p_solve.set_defaults(func=cmd_solve)

    p_eval = sub.add_parser("eval", help="evaluate a schedule file")
    p_eval.add_argument("--instance", type=Path, required=True)
    p_eval.add_argument("--schedule", type=Path, required=True)
    _add_common(p_eval)
    p_eval.set_defaults(func=cmd_eval)

    p_oracle = sub.add_parser(
        "oracle", help="compare the engine against the exhaustive front"
    )
    p_oracle.add_argument("--instance", type=Path, required=True)
    _add_evolution_flags(p_oracle)
    p_oracle.add_argument(
        "--report", action="store_true",
        help="also write front_report.csv into the output directory",
    )
    _add_common(p_oracle)
    p_oracle.set_defaults(func=cmd_oracle)

    p_case = sub.add_parser("paper-case", help="run a built-in study configuration")
    p_case.add_argument("--case", choices=sorted(PAPER_CASES), required=True)
    p_case.add_argument(
        "--epsilon", type=float, default=DEFAULT_EPSILON,
        help="edge probability for the generated instance (default 0.5)",
    )
    p_case.add_argument(
        "--generations", type=int, default=None,
        help=f"replace the default iteration counts {PAPER_ITERATIONS} with one value",
    )
    p_case.add_argument("--workers", type=int, default=1)
    _add_common(p_case)
    p_case.set_defaults(func=cmd_paper_case)

    return parser


def cmd_gen(args) -> int:
    instance = generate_instance(
        args.tasks,
        args.procs,
        args.epsilon,
        dist=args.dist,
        mean=args.mean,
        seed=args.seed,
        link_delay_range=(args.delay_min, args.delay_max),
        with_deadlines=not args.no_deadlines,
    )
    save_instance(instance, args.out)
    if not args.quiet:
        print(
            f"wrote {args.out}: {instance.n_tasks} tasks, "
            f"{instance.n_procs} processors, {instance.graph.n_edges} edges, "
            f"mean exec time {instance.platform.exec_time.mean():.4f}"
        )
    return 0


def _evolution_config(args, n_tasks: int) -> EvolutionConfig:
    pop = args.pop_size if args.pop_size is not None else 2 * n_tasks
    return EvolutionConfig(
        pop_size=pop,
        generations=args.generations,
        p_crossover=args.pc,
        p_mutation=args.pm,
        seed=args.seed,
    )


def cmd_solve(args) -> int:
    instance = load_instance(args.instance)
    config = RunConfig(
        instance_path=args.instance,
        evolution=_evolution_config(args, instance.n_tasks),
        output_dir=args.out_dir,
        emit_stats=not args.no_stats,
        workers=args.workers,
    )
    solve_to_files(instance, config, quiet=args.quiet)
    return 0


def cmd_eval(args) -> int:
    instance = load_instance(args.instance)
    schedule = load_schedule(args.schedule)
    if schedule.n_procs != instance.n_procs:
        print(
            f"error: schedule has {schedule.n_procs} processor lines, "
            f"instance has {instance.n_procs} processors",
            file=sys.stderr,
        )
        return 1
    problems = schedule_violations(schedule, instance.graph)
    if problems:
        print("error: schedule is not legal:", file=sys.stderr)
        for p in problems:
            print(f"  {p}", file=sys.stderr)
        return 1
    vec, timing, proc_of = Evaluator(instance).timing(schedule)
    print(f"makespan {repr(vec.makespan)}")
    print(f"reliability_cost {vec.reliability_cost:.8e}")
    if instance.deadlines is not None:
        count, flags = deadline_misses(timing, instance.deadlines)
        print(f"deadline_misses {count}")
    else:
        flags = [False] * instance.n_tasks
        print("deadline_misses n/a")
    print("task proc start finish" + (" missed" if instance.deadlines is not None else ""))
    for i in range(instance.n_tasks):
        line = f"{i} {proc_of[i]} {timing.start[i]:.6f} {timing.finish[i]:.6f}"
        if instance.deadlines is not None:
            line += f" {'yes' if flags[i] else 'no'}"
        print(line)
    return 0


def cmd_oracle(args) -> int:
    instance = load_instance(args.instance)
    exact = exact_pareto_front(instance)
    config = _evolution_config(args, instance.n_tasks)
    result = run(instance, config, workers=args.workers)
    found = [p.objectives for p in result.front]
    coverage, deviation = front_distance(found, exact)
    if not args.quiet:
        print(f"exact front: {len(exact.points)} points")
        for e in exact.points:
            print(f"  makespan {e.makespan:.6f}  rc {e.reliability_cost:.8e}")
        print(f"found front: {len(found)} points")
        for f in found:
            print(f"  makespan {f.makespan:.6f}  rc {f.reliability_cost:.8e}")
    print(f"coverage {coverage:.4f}")
    print(f"deviation {repr(deviation)}")
    if args.report:
        write_front_report(args.out_dir / "front_report.csv", found, exact)
    return 0


def cmd_paper_case(args) -> int:
    case = PAPER_CASES[args.case]
    counts = [args.generations] if args.generations is not None else list(PAPER_ITERATIONS)
    for dist in case["dists"]:
        instance = generate_instance(
            case["n_tasks"],
            case["n_procs"],
            args.epsilon,
            dist=dist,
            seed=args.seed,
        )
        save_instance(instance, args.out_dir / f"{args.case}_{dist}.instance")
        for gens in counts:
            config = EvolutionConfig(
                pop_size=2 * case["n_tasks"],
                generations=gens,
                seed=args.seed,
            )
            result = run(instance, config, workers=args.workers)
            out = args.out_dir / f"{args.case}_{dist}_front_gen{gens}.csv"
            _atomic_write_text(out, front_csv(result.front))
            if not args.quiet:
                print(
                    f"{args.case} {dist} gen{gens}: {len(result.front)} front points "
                    f"-> {out}"
                )
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (
        InstanceFormatError,
        OracleSizeError,
        IllegalScheduleError,
        ValueError,
        OSError,
    ) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
