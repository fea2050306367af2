"""Elitist two-objective evolutionary engine.

Populations hold legal schedules with their objective vectors. Each
generation builds pop_size offspring by binary tournament, height-preserving
crossover and same-height swap mutation, then keeps the best pop_size members
of parents plus offspring by non-domination rank, breaking rank ties by
crowding distance. Parents survive unaltered when they win, so per-objective
bests never get worse from one generation to the next.

Everything is a pure function of (instance, config, seed): one seeded
generator is threaded through in a fixed order. Per offspring pair the
stream is consumed as: tournament draws for each parent, the crossover coin,
the cut height if crossover fires, then per child the mutation coin and, if
it fires, the mutation picks. Offspring evaluation consumes no randomness,
so the evaluation parallelism level cannot change any result.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from . import _backend
from .instance import Instance, TaskGraph
from .schedule import (
    Evaluator,
    IllegalScheduleError,
    ObjectiveVector,
    Schedule,
    compute_heights,
    is_legal,
    random_schedule,
)


@dataclass
class Individual:
    """A schedule with its objectives and (once ranked) NSGA bookkeeping."""

    schedule: Schedule
    objectives: ObjectiveVector
    rank: int | None = None
    crowding: float | None = None
    index: int | None = None


@dataclass
class Population:
    members: list[Individual]
    generation: int = 0


@dataclass(frozen=True)
class EvolutionConfig:
    """Engine parameters. Defaults: crossover 0.9, mutation 0.1 per child,
    binary tournaments. pop_size must be even so pairs produce exactly
    pop_size offspring."""

    pop_size: int
    generations: int = 100
    p_crossover: float = 0.9
    p_mutation: float = 0.1
    seed: int = 0
    tournament_size: int = 2

    def __post_init__(self):
        if self.pop_size < 2:
            raise ValueError("pop_size must be >= 2")
        if self.pop_size % 2 != 0:
            raise ValueError(f"pop_size must be even, got {self.pop_size}")
        if self.generations < 0:
            raise ValueError("generations must be >= 0")
        for name in ("p_crossover", "p_mutation"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {v}")
        if self.tournament_size < 1:
            raise ValueError("tournament_size must be >= 1")


class GenerationStats(NamedTuple):
    generation: int
    best_makespan: float
    best_rc: float
    mean_makespan: float
    mean_rc: float
    front0_size: int


class FrontPoint(NamedTuple):
    objectives: ObjectiveVector
    schedule: Schedule


@dataclass
class RunResult:
    front: list[FrontPoint]
    stats: list[GenerationStats]
    population: Population


def dominates(a, b) -> bool:
    """a is no worse in both objectives and strictly better in at least one."""
    return a[0] <= b[0] and a[1] <= b[1] and (a[0] < b[0] or a[1] < b[1])


def fast_nondominated_sort(objectives) -> list[list[int]]:
    """Partition point indices into fronts; front 0 is the non-dominated set.

    Every point in front k is dominated only by points in fronts < k, and
    each point appears in exactly one front. Indices come out ascending
    within each front.
    """
    objs = list(objectives)
    if not objs:
        raise ValueError("objectives must be non-empty")
    ranks = _backend.nondominated_ranks(objs)
    fronts: list[list[int]] = [[] for _ in range(max(ranks) + 1)]
    for i, r in enumerate(ranks):
        fronts[r].append(i)
    return fronts


def assign_crowding(front, objectives) -> list[float]:
    """Crowding distance of each front member, aligned with front order.

    Per objective the front is sorted, the two extremes get +inf, and each
    interior member accumulates the gap between its neighbors normalized by
    the objective's range over the front. A zero range contributes nothing to
    the interiors. Fronts of size one or two are all +inf.
    """
    size = len(front)
    dist = [0.0] * size
    if size <= 2:
        return [math.inf] * size
    for obj in range(2):
        order = sorted(range(size), key=lambda k: objectives[front[k]][obj])
        dist[order[0]] = math.inf
        dist[order[-1]] = math.inf
        lo = objectives[front[order[0]]][obj]
        hi = objectives[front[order[-1]]][obj]
        span = hi - lo
        if span <= 0.0:
            continue
        for pos in range(1, size - 1):
            gap = (
                objectives[front[order[pos + 1]]][obj]
                - objectives[front[order[pos - 1]]][obj]
            )
            dist[order[pos]] += gap / span
    return dist


def crowded_compare(a: Individual, b: Individual) -> int:
    """-1 when a precedes b, +1 when b precedes a, 0 only for a vs itself.

    Lower rank wins; within a rank larger crowding wins; exact ties fall back
    to the lower member index, so the ordering is total on any ranked
    population.
    """
    if a.rank is None or b.rank is None or a.crowding is None or b.crowding is None:
        raise ValueError("individuals must be ranked and crowded before comparison")
    if a.rank != b.rank:
        return -1 if a.rank < b.rank else 1
    if a.crowding != b.crowding:
        return -1 if a.crowding > b.crowding else 1
    if a.index is None or b.index is None:
        raise ValueError("individuals must carry a member index for tie-breaking")
    if a.index == b.index:
        return 0
    return -1 if a.index < b.index else 1


def rank_and_crowd(members: list[Individual]) -> list[list[int]]:
    """Assign rank, crowding and member index to every individual in place."""
    objs = [ind.objectives for ind in members]
    fronts = fast_nondominated_sort(objs)
    for i, ind in enumerate(members):
        ind.index = i
    for r, front in enumerate(fronts):
        crowd = assign_crowding(front, objs)
        for i, c in zip(front, crowd):
            members[i].rank = r
            members[i].crowding = c
    return fronts


def tournament_select(
    population, rng: np.random.Generator, tournament_size: int = 2
) -> Individual:
    """Draw tournament_size members uniformly with replacement; best wins."""
    members = population.members if isinstance(population, Population) else population
    if not members:
        raise ValueError("population is empty")
    draws = rng.integers(0, len(members), size=tournament_size)
    best = members[int(draws[0])]
    for d in draws[1:]:
        cand = members[int(d)]
        if crowded_compare(cand, best) < 0:
            best = cand
    return best


def crossover(
    a: Schedule,
    b: Schedule,
    graph: TaskGraph,
    rng: np.random.Generator,
    heights: list[int] | None = None,
) -> tuple[Schedule, Schedule]:
    """Height-cut crossover; both children are legal by construction.

    A cut height c is drawn uniformly from 0..max height. Each processor list
    splits after its last task of height <= c; the children swap the suffixes
    processor by processor. Prefixes jointly hold exactly the tasks of height
    <= c and suffixes the rest, so each child is still a partition, and
    concatenating two height-sorted runs at the cut keeps the order sorted.
    """
    if heights is None:
        heights = compute_heights(graph)
    for name, s in (("first", a), ("second", b)):
        if not is_legal(s, graph, heights):
            raise IllegalScheduleError(f"{name} parent is not a legal schedule")
    if a.n_procs != b.n_procs:
        raise IllegalScheduleError("parents use different processor counts")
    maxh = max(heights)
    c = int(rng.integers(0, maxh + 1))

    def split(s: Schedule):
        pres, sufs = [], []
        for lst in s.proc_lists:
            k = 0
            while k < len(lst) and heights[lst[k]] <= c:
                k += 1
            pres.append(lst[:k])
            sufs.append(lst[k:])
        return pres, sufs

    pre_a, suf_a = split(a)
    pre_b, suf_b = split(b)
    child1 = Schedule(tuple(pa + sb for pa, sb in zip(pre_a, suf_b)))
    child2 = Schedule(tuple(pb + sa for pb, sa in zip(pre_b, suf_a)))
    return child1, child2


def mutate(
    s: Schedule,
    graph: TaskGraph,
    rng: np.random.Generator,
    heights: list[int] | None = None,
) -> Schedule:
    """Swap a uniformly chosen task with a uniform same-height partner.

    The partner may sit on another processor, so mutation can move work
    between processors. When the chosen task is alone at its height the
    schedule is returned unchanged (the pick still consumed one draw).
    Swapping equal heights preserves both legality invariants.
    """
    if heights is None:
        heights = compute_heights(graph)
    n = graph.n_tasks
    ti = int(rng.integers(n))
    partners = [t for t in range(n) if t != ti and heights[t] == heights[ti]]
    if not partners:
        return s
    tj = partners[int(rng.integers(len(partners)))]
    lists = [list(lst) for lst in s.proc_lists]
    spot: dict[int, tuple[int, int]] = {}
    for j, lst in enumerate(lists):
        for k, t in enumerate(lst):
            if t == ti or t == tj:
                spot[t] = (j, k)
    (j1, k1), (j2, k2) = spot[ti], spot[tj]
    lists[j1][k1], lists[j2][k2] = tj, ti
    return Schedule(tuple(tuple(lst) for lst in lists))


def _evaluate_all(
    evaluator: Evaluator, schedules: list[Schedule], workers: int
) -> list[ObjectiveVector]:
    if workers <= 1:
        return [evaluator.evaluate(s) for s in schedules]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(evaluator.evaluate, schedules))


def _as_evaluator(instance) -> Evaluator:
    return instance if isinstance(instance, Evaluator) else Evaluator(instance)


def make_offspring(
    population: Population,
    config: EvolutionConfig,
    instance,
    rng: np.random.Generator,
    workers: int = 1,
) -> list[Individual]:
    """Produce pop_size evaluated children from a ranked population."""
    ev = _as_evaluator(instance)
    graph = ev.instance.graph
    heights = ev.heights
    children: list[Schedule] = []
    for _ in range(config.pop_size // 2):
        p1 = tournament_select(population, rng, config.tournament_size).schedule
        p2 = tournament_select(population, rng, config.tournament_size).schedule
        if rng.random() < config.p_crossover:
            c1, c2 = crossover(p1, p2, graph, rng, heights=heights)
        else:
            c1, c2 = p1, p2
        for child in (c1, c2):
            if rng.random() < config.p_mutation:
                child = mutate(child, graph, rng, heights=heights)
            children.append(child)
    objs = _evaluate_all(ev, children, workers)
    return [Individual(s, o) for s, o in zip(children, objs)]


def evolve_generation(
    population: Population,
    config: EvolutionConfig,
    instance,
    rng: np.random.Generator,
    workers: int = 1,
) -> Population:
    """One elitist step: parents + offspring truncated back to pop_size.

    Whole fronts are admitted while they fit; the front that overflows is
    sorted by crowding distance descending (stable, so ties keep their front
    order) and cut. The returned population is ranked and crowded.
    """
    offspring = make_offspring(population, config, instance, rng, workers)
    combined = population.members + offspring
    fronts = rank_and_crowd(combined)
    survivors: list[Individual] = []
    for front in fronts:
        if len(survivors) + len(front) <= config.pop_size:
            survivors.extend(combined[i] for i in front)
            continue
        room = config.pop_size - len(survivors)
        if room > 0:
            by_crowding = sorted(front, key=lambda i: -combined[i].crowding)
            survivors.extend(combined[i] for i in by_crowding[:room])
        break
    nxt = Population(survivors, population.generation + 1)
    rank_and_crowd(nxt.members)
    return nxt


def _collect_stats(pop: Population) -> GenerationStats:
    mks = [ind.objectives.makespan for ind in pop.members]
    rcs = [ind.objectives.reliability_cost for ind in pop.members]
    front0 = sum(1 for ind in pop.members if ind.rank == 0)
    return GenerationStats(
        pop.generation,
        min(mks),
        min(rcs),
        sum(mks) / len(mks),
        sum(rcs) / len(rcs),
        front0,
    )


def extract_front(pop: Population) -> list[FrontPoint]:
    """Rank-0 members, deduplicated by objective vector, makespan ascending."""
    rank0 = [ind for ind in pop.members if ind.rank == 0]
    rank0.sort(key=lambda ind: (ind.objectives.makespan, ind.objectives.reliability_cost))
    seen: set[ObjectiveVector] = set()
    front = []
    for ind in rank0:
        if ind.objectives in seen:
            continue
        seen.add(ind.objectives)
        front.append(FrontPoint(ind.objectives, ind.schedule))
    return front


def run(instance: Instance, config: EvolutionConfig, workers: int = 1) -> RunResult:
    """Full optimization: seeded init, config.generations elitist steps.

    Returns the final deduplicated front (witness schedules included), one
    stats row per generation starting at generation 0 (the evaluated random
    population), and the final ranked population. Reruns with the same
    instance, config and workers value are identical; reruns with a different
    workers value are identical too, since evaluation consumes no randomness.
    """
    ev = _as_evaluator(instance)
    rng = np.random.default_rng(config.seed)
    schedules = [random_schedule(ev.instance, rng) for _ in range(config.pop_size)]
    objs = _evaluate_all(ev, schedules, workers)
    pop = Population([Individual(s, o) for s, o in zip(schedules, objs)], 0)
    rank_and_crowd(pop.members)
    stats = [_collect_stats(pop)]
    for _ in range(config.generations):
        pop = evolve_generation(pop, config, ev, rng, workers)
        stats.append(_collect_stats(pop))
    return RunResult(extract_front(pop), stats, pop)
