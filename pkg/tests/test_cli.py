import csv
import subprocess
import sys

import pytest

from dagsched import (
    Schedule,
    evaluate,
    generate_instance,
    load_instance,
    save_instance,
)
from dagsched.cli import main
from dagsched.schedule import save_schedule, schedule_from_text


def run_cli(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def instance_file(tmp_path):
    path = tmp_path / "inst.txt"
    save_instance(generate_instance(6, 2, 0.5, seed=3), path)
    return path


class TestGen:
    def test_writes_loadable_instance(self, tmp_path, capsys):
        out = tmp_path / "g.instance"
        code = run_cli(
            "gen", "--tasks", 7, "--procs", 2, "--epsilon", 0.4, "--seed", 5,
            "--out", out,
        )
        assert code == 0
        inst = load_instance(out)
        assert (inst.n_tasks, inst.n_procs) == (7, 2)
        assert inst == generate_instance(7, 2, 0.4, seed=5)
        summary = capsys.readouterr().out
        assert "7 tasks" in summary and "edges" in summary

    def test_quiet(self, tmp_path, capsys):
        run_cli(
            "gen", "--tasks", 4, "--procs", 2, "--out", tmp_path / "g.instance",
            "--quiet",
        )
        assert capsys.readouterr().out == ""

    def test_no_deadlines_flag(self, tmp_path):
        out = tmp_path / "g.instance"
        run_cli("gen", "--tasks", 4, "--procs", 2, "--out", out, "--no-deadlines",
                "--quiet")
        assert load_instance(out).deadlines is None


class TestSolve:
    def test_writes_front_and_stats(self, tmp_path, instance_file, capsys):
        code = run_cli(
            "solve", "--instance", instance_file, "--generations", 15,
            "--seed", 2, "--out-dir", tmp_path / "out",
        )
        assert code == 0
        front_lines = (tmp_path / "out" / "front.csv").read_text().splitlines()
        stats_lines = (tmp_path / "out" / "stats.csv").read_text().splitlines()
        assert front_lines[0] == "makespan,reliability_cost,schedule"
        assert stats_lines[0] == (
            "generation,best_makespan,best_rc,mean_makespan,mean_rc,front0_size"
        )
        assert len(stats_lines) == 1 + 16  # header + generations 0..15
        # default pop size is twice the task count
        assert "pop_size 12" in capsys.readouterr().out

    def test_front_rows_reevaluate_to_their_objectives(self, tmp_path, instance_file):
        run_cli(
            "solve", "--instance", instance_file, "--generations", 10,
            "--seed", 1, "--out-dir", tmp_path / "out", "--quiet",
        )
        inst = load_instance(instance_file)
        with (tmp_path / "out" / "front.csv").open() as fh:
            rows = list(csv.DictReader(fh))
        assert rows
        for row in rows:
            s = schedule_from_text(row["schedule"], sep="|")
            vec = evaluate(s, inst)
            assert vec.makespan == float(row["makespan"])  # repr round-trips
            assert vec.reliability_cost == pytest.approx(
                float(row["reliability_cost"]), rel=1e-8
            )

    def test_no_stats_flag(self, tmp_path, instance_file):
        run_cli(
            "solve", "--instance", instance_file, "--generations", 5,
            "--out-dir", tmp_path / "out", "--no-stats", "--quiet",
        )
        assert (tmp_path / "out" / "front.csv").exists()
        assert not (tmp_path / "out" / "stats.csv").exists()

    def test_reruns_byte_identical(self, tmp_path, instance_file):
        for d in ("a", "b"):
            run_cli(
                "solve", "--instance", instance_file, "--generations", 12,
                "--seed", 9, "--out-dir", tmp_path / d, "--quiet",
            )
        assert (tmp_path / "a" / "front.csv").read_bytes() == (
            tmp_path / "b" / "front.csv"
        ).read_bytes()
        assert (tmp_path / "a" / "stats.csv").read_bytes() == (
            tmp_path / "b" / "stats.csv"
        ).read_bytes()

    def test_missing_instance_file(self, tmp_path, capsys):
        code = run_cli("solve", "--instance", tmp_path / "absent.txt", "--quiet")
        assert code == 1
        assert capsys.readouterr().err.startswith("error:")


class TestEval:
    def test_happy_path(self, tmp_path, instance_file, capsys):
        inst = load_instance(instance_file)
        from dagsched import random_schedule
        import numpy as np

        s = random_schedule(inst, np.random.default_rng(0))
        sched_file = tmp_path / "s.sched"
        save_schedule(s, sched_file)
        code = run_cli("eval", "--instance", instance_file, "--schedule", sched_file)
        assert code == 0
        out = capsys.readouterr().out
        assert out.startswith("makespan ")
        assert "reliability_cost" in out
        assert "deadline_misses" in out
        vec = evaluate(s, inst)
        assert repr(vec.makespan) in out

    def test_no_deadlines_reports_na(self, tmp_path, capsys):
        inst = generate_instance(4, 2, 0.5, seed=1, with_deadlines=False)
        ipath = tmp_path / "i.txt"
        save_instance(inst, ipath)
        spath = tmp_path / "s.sched"
        import numpy as np
        from dagsched import random_schedule

        save_schedule(random_schedule(inst, np.random.default_rng(0)), spath)
        assert run_cli("eval", "--instance", ipath, "--schedule", spath) == 0
        assert "deadline_misses n/a" in capsys.readouterr().out

    def test_illegal_schedule(self, tmp_path, instance_file, capsys):
        sched_file = tmp_path / "s.sched"
        sched_file.write_text("0,1,2\n3,4\n")  # task 5 missing
        code = run_cli("eval", "--instance", instance_file, "--schedule", sched_file)
        assert code == 1
        assert "not legal" in capsys.readouterr().err

    def test_proc_count_mismatch(self, tmp_path, instance_file, capsys):
        sched_file = tmp_path / "s.sched"
        sched_file.write_text("0,1,2,3,4,5\n")
        code = run_cli("eval", "--instance", instance_file, "--schedule", sched_file)
        assert code == 1
        assert "processor" in capsys.readouterr().err


class TestOracle:
    def test_coverage_output(self, tmp_path, instance_file, capsys):
        code = run_cli(
            "oracle", "--instance", instance_file, "--pop-size", 12,
            "--generations", 40, "--out-dir", tmp_path,
        )
        assert code == 0
        out = capsys.readouterr().out
        assert "exact front:" in out
        assert "coverage " in out
        assert "deviation " in out

    def test_report_file(self, tmp_path, instance_file):
        run_cli(
            "oracle", "--instance", instance_file, "--generations", 20,
            "--out-dir", tmp_path, "--report", "--quiet",
        )
        report = (tmp_path / "front_report.csv").read_text().splitlines()
        assert report[0].startswith("exact_makespan,")
        assert len(report) >= 2

    def test_size_guard_reported(self, tmp_path, capsys):
        big = tmp_path / "big.txt"
        save_instance(generate_instance(12, 2, 0.3, seed=0), big)
        code = run_cli("oracle", "--instance", big, "--quiet")
        assert code == 1
        assert "error:" in capsys.readouterr().err


class TestPaperCase:
    def test_case1_outputs(self, tmp_path, capsys):
        code = run_cli(
            "paper-case", "--case", "case1", "--out-dir", tmp_path, "--quiet",
            "--generations", 2,
        )
        assert code == 0
        for dist in ("normal", "exponential"):
            inst_path = tmp_path / f"case1_{dist}.instance"
            assert inst_path.exists()
            inst = load_instance(inst_path)
            assert (inst.n_tasks, inst.n_procs) == (10, 2)
            front = (tmp_path / f"case1_{dist}_front_gen2.csv").read_text()
            assert front.startswith("makespan,reliability_cost,schedule")

    def test_default_iteration_counts(self, tmp_path):
        run_cli("paper-case", "--case", "case1", "--out-dir", tmp_path, "--quiet")
        for gens in (1, 5):
            assert (tmp_path / f"case1_normal_front_gen{gens}.csv").exists()
            assert (tmp_path / f"case1_exponential_front_gen{gens}.csv").exists()

    def test_unknown_case_rejected(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("paper-case", "--case", "case9")
        assert exc.value.code == 2


class TestParser:
    def test_missing_required_flag(self):
        with pytest.raises(SystemExit) as exc:
            run_cli("solve")
        assert exc.value.code == 2

    def test_no_command(self):
        with pytest.raises(SystemExit) as exc:
            run_cli()
        assert exc.value.code == 2

    def test_console_script_installed(self, tmp_path):
        out = tmp_path / "c.instance"
        proc = subprocess.run(
            [
                "dagsched", "gen", "--tasks", "4", "--procs", "2",
                "--out", str(out), "--quiet",
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists()

    def test_module_entry_point(self, tmp_path):
        out = tmp_path / "m.instance"
        proc = subprocess.run(
            [
                sys.executable, "-m", "dagsched.cli", "gen", "--tasks", "4",
                "--procs", "2", "--out", str(out), "--quiet",
            ],
            capture_output=True,
            text=True,
        )
        assert proc.returncode == 0, proc.stderr
        assert out.exists()
