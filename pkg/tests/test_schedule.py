import numpy as np
import pytest

from dagsched import (
    Evaluator,
    IllegalScheduleError,
    Schedule,
    compute_heights,
    deadline_misses,
    evaluate,
    evaluate_makespan,
    evaluate_reliability_cost,
    generate_instance,
    is_legal,
    random_schedule,
)
from dagsched.schedule import (
    load_schedule,
    save_schedule,
    schedule_from_text,
    schedule_to_text,
    schedule_violations,
)


class TestHeights:
    def test_diamond(self, diamond_instance):
        assert compute_heights(diamond_instance.graph) == [0, 1, 1, 2]

    def test_independent_tasks(self, nogap_instance):
        assert compute_heights(nogap_instance.graph) == [0, 1, 0]

    def test_chain(self, chain2_instance):
        assert compute_heights(chain2_instance.graph) == [0, 1]


class TestLegality:
    def test_legal(self, diamond_instance):
        g = diamond_instance.graph
        assert is_legal(Schedule(((0, 1), (2, 3))), g)
        assert is_legal(Schedule(((0, 1, 2, 3), ())), g)

    def test_height_order_violation(self, diamond_instance):
        g = diamond_instance.graph
        s = Schedule(((1, 0), (2, 3)))
        msgs = schedule_violations(s, g)
        assert msgs and "not non-decreasing" in msgs[0]

    def test_missing_and_duplicate(self, diamond_instance):
        g = diamond_instance.graph
        assert any(
            "never scheduled" in m for m in schedule_violations(Schedule(((0, 1), (3,))), g)
        )
        assert any(
            "more than once" in m
            for m in schedule_violations(Schedule(((0, 1, 2), (2, 3))), g)
        )

    def test_out_of_range(self, diamond_instance):
        msgs = schedule_violations(Schedule(((0, 9), ())), diamond_instance.graph)
        assert any("out of range" in m for m in msgs)

    def test_assignment(self):
        s = Schedule(((0, 2), (1,)))
        assert s.assignment(3) == [0, 1, 0]
        with pytest.raises(IllegalScheduleError):
            Schedule(((0,), ())).assignment(2)


class TestRandomSchedule:
    def test_always_legal(self):
        rng = np.random.default_rng(0)
        for seed in range(10):
            inst = generate_instance(12, 3, 0.4, seed=seed)
            for _ in range(20):
                s = random_schedule(inst, rng)
                assert is_legal(s, inst.graph)
                assert s.n_procs == 3

    def test_deterministic_per_seed(self, diamond_instance):
        a = random_schedule(diamond_instance, np.random.default_rng(5))
        b = random_schedule(diamond_instance, np.random.default_rng(5))
        assert a == b

    def test_reaches_unbalanced_partitions(self):
        # four independent tasks on two processors: a uniform random
        # partition puts all four on one processor eventually
        inst = generate_instance(4, 2, 0.0, seed=0)
        rng = np.random.default_rng(1)
        seen_all_on_one = False
        for _ in range(200):
            s = random_schedule(inst, rng)
            if any(len(lst) == 4 for lst in s.proc_lists):
                seen_all_on_one = True
                break
        assert seen_all_on_one


class TestEvaluatorFrozenValues:
    def test_single_task(self, single_task_instance):
        vec = evaluate(Schedule(((0,),)), single_task_instance)
        assert vec.makespan == 8.0
        assert vec.reliability_cost == pytest.approx(8e-5, rel=1e-12)

    def test_chain_cross_processor(self, chain2_instance):
        vec, timing, proc_of = Evaluator(chain2_instance).timing(Schedule(((0,), (1,))))
        assert vec.makespan == 8.0
        assert timing.earliest[1] == 4.0
        assert timing.start[1] == 4.0
        assert list(timing.finish) == [3.0, 8.0]
        assert proc_of == [0, 1]
        assert vec.reliability_cost == pytest.approx(1.13e-4, rel=1e-12)

    def test_chain_same_processor(self, chain2_instance):
        vec = evaluate(Schedule(((0, 1), ())), chain2_instance)
        assert vec.makespan == 13.0
        assert vec.reliability_cost == pytest.approx(1.3e-4, rel=1e-12)

    def test_diamond(self, diamond_instance):
        vec, timing, _ = Evaluator(diamond_instance).timing(Schedule(((0, 1), (2, 3))))
        assert vec.makespan == 8.5
        assert list(timing.start) == [0.0, 2.0, 3.0, 7.5]
        assert list(timing.finish) == [2.0, 6.0, 5.0, 8.5]
        assert vec.reliability_cost == pytest.approx(1.225e-4, rel=1e-12)

    def test_no_gap_filling(self, nogap_instance):
        # task 2 has no predecessors but sits behind task 0 in list order
        mk, timing = evaluate_makespan(Schedule(((0, 2), (1,))), nogap_instance)
        assert timing.start[2] == 5.0
        assert timing.finish[2] == 6.0
        assert mk == 6.5

    def test_module_level_helpers_agree(self, diamond_instance):
        s = Schedule(((0, 2), (1, 3)))
        vec = evaluate(s, diamond_instance)
        mk, _ = evaluate_makespan(s, diamond_instance)
        rc = evaluate_reliability_cost(s, diamond_instance)
        assert (mk, rc) == (vec.makespan, vec.reliability_cost)


class TestEvaluatorErrors:
    def test_illegal_schedule_rejected(self, diamond_instance):
        ev = Evaluator(diamond_instance)
        with pytest.raises(IllegalScheduleError):
            ev.evaluate(Schedule(((1, 0), (2, 3))))

    def test_wrong_proc_count_rejected(self, diamond_instance):
        ev = Evaluator(diamond_instance)
        with pytest.raises(IllegalScheduleError, match="processor"):
            ev.evaluate(Schedule(((0, 1, 2, 3),)))

    def test_invalid_instance_rejected(self):
        bad = generate_instance(3, 2, 0.5, seed=0)
        bad.platform.exec_time[0, 0] = -1.0
        with pytest.raises(ValueError, match="strictly positive"):
            Evaluator(bad)


class TestDeadlines:
    def test_strict_inequality(self, single_task_instance):
        _, timing = evaluate_makespan(Schedule(((0,),)), single_task_instance)
        count, flags = deadline_misses(timing, [8.0])
        assert (count, flags) == (0, [False])
        count, flags = deadline_misses(timing, [7.999])
        assert (count, flags) == (1, [True])

    def test_infinite_deadlines(self, diamond_instance):
        _, timing = evaluate_makespan(Schedule(((0, 1), (2, 3))), diamond_instance)
        count, _ = deadline_misses(timing, [np.inf] * 4)
        assert count == 0

    def test_shape_mismatch(self, single_task_instance):
        _, timing = evaluate_makespan(Schedule(((0,),)), single_task_instance)
        with pytest.raises(ValueError):
            deadline_misses(timing, [1.0, 2.0])


class TestScheduleText:
    def test_round_trip(self):
        s = Schedule(((0, 2), (), (1, 3)))
        assert schedule_from_text(schedule_to_text(s)) == s

    def test_layout(self):
        assert schedule_to_text(Schedule(((0, 2), (1,)))) == "0,2\n1\n"
        assert schedule_to_text(Schedule(((0, 2), (1,))), sep="|") == "0,2|1"

    def test_pipe_round_trip(self):
        s = Schedule(((4,), (0, 1), ()))
        assert schedule_from_text(schedule_to_text(s, sep="|"), sep="|") == s

    def test_parse_error_names_processor(self):
        with pytest.raises(ValueError, match="processor 1"):
            schedule_from_text("0,1\ntwo\n")

    def test_save_load(self, tmp_path):
        s = Schedule(((1, 0), (2,)))
        path = tmp_path / "s.sched"
        save_schedule(s, path)
        assert load_schedule(path) == s
