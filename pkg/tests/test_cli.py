import json
import os
import subprocess
import sys

import numpy as np
import pytest

from logarrange import bench
from logarrange.cli import main

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
STAR = os.path.join(ROOT, "benchmarks", "fixtures", "star.txt")
GOLDEN = os.path.join(os.path.dirname(__file__), "golden", "star_report.txt")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def kv(text):
    return dict(line.split("=", 1) for line in text.splitlines() if "=" in line)


class TestSolve:
    def test_star_report(self, capsys):
        code, out, _ = run(capsys, "solve", "--input", STAR)
        rep = kv(out)
        assert code == 0
        assert float(rep["cost"]) == 1.0
        assert float(rep["beta"]) == pytest.approx(1 / 3, rel=1e-12)
        assert float(rep["beta"]) == float(rep["cost"]) / float(rep["total_weight"])

    def test_golden_modulo_timings(self, capsys):
        _, out, _ = run(capsys, "solve", "--input", STAR, "--seed", "1")
        lines = [ln for ln in out.splitlines() if not ln.startswith("time.")]
        with open(GOLDEN) as fh:
            assert lines == fh.read().splitlines()
        timing = [ln for ln in out.splitlines() if ln.startswith("time.")]
        assert all(float(ln.split("=")[1]) >= 0 for ln in timing)

    def test_same_seed_byte_identical(self, tmp_path, capsys):
        g = tmp_path / "g.txt"
        assert run(capsys, "generate", "pa:n=300,m=2,seed=4", "--out", str(g))[0] == 0
        p1, p2 = tmp_path / "a.perm", tmp_path / "b.perm"
        for p in (p1, p2):
            assert run(capsys, "solve", "--input", str(g), "--seed", "1",
                       "--out-perm", str(p))[0] == 0
        assert p1.read_bytes() == p2.read_bytes()

    def test_missing_input(self, capsys):
        code, _, err = run(capsys, "solve", "--input", "/nonexistent/graph.txt")
        assert code == 2 and "no such file" in err

    def test_usage_error(self, capsys):
        code, _, err = run(capsys, "solve")
        assert code == 2 and "--input" in err

    def test_bad_override(self, capsys):
        code, _, err = run(capsys, "solve", "--input", STAR, "--theta1", "1.5")
        assert code == 2 and "theta" in err

    def test_overrides_echoed_json(self, tmp_path, capsys):
        rep = tmp_path / "r.json"
        code, _, _ = run(capsys, "solve", "--input", STAR, "--preset", "fast", "--R", "2",
                         "--sweeps", "3", "--nn-k", "1", "--coarsest", "3", "--order", "2",
                         "--report", str(rep), "--report-format", "json")
        d = json.loads(rep.read_text())
        assert code == 0
        assert (d["param.n_vectors"], d["param.compat_sweeps"], d["param.gs_sweeps"],
                d["param.nn_k"], d["param.coarsest_size"], d["param.interp_order"]) == \
            (2, 3, 3, 1, 3, 2)
        assert d["preset"] == "fast" and d["cost"] == 1.0

    def test_verbose_and_couplings(self, tmp_path, capsys):
        g = tmp_path / "g.txt"
        run(capsys, "generate", "grid:rows=5,cols=5", "--out", str(g))
        dump = tmp_path / "rho.txt"
        code, _, err = run(capsys, "solve", "--input", str(g), "--verbose",
                           "--dump-couplings", str(dump))
        assert code == 0 and "level 0: n=25 m=40" in err
        rows = [ln.split() for ln in dump.read_text().splitlines()]
        assert len(rows) == 40 and all(float(r[2]) > 0 for r in rows)

    def test_directed_weighted(self, tmp_path, capsys):
        g = tmp_path / "g.txt"
        g.write_text("0 1 2\n1 0 3\n1 2 1\n")
        code, out, _ = run(capsys, "solve", "--input", str(g), "--directed", "--weighted")
        rep = kv(out)
        assert code == 0 and rep["directed"] == "true" and rep["total_weight"] == "6.0"


class TestEval:
    def test_reproduces_solve_cost(self, tmp_path, capsys):
        g = tmp_path / "g.txt"
        run(capsys, "generate", "regular:n=200,d=3,seed=2", "--out", str(g))
        perm = tmp_path / "p.txt"
        _, out, _ = run(capsys, "solve", "--input", str(g), "--out-perm", str(perm))
        _, out2, _ = run(capsys, "eval", "--input", str(g), "--perm", str(perm))
        assert kv(out)["cost"] == kv(out2)["cost"]

    def test_path_natural(self, tmp_path, capsys):
        g = tmp_path / "g.txt"
        g.write_text("0 1\n1 2\n2 3\n")
        p = tmp_path / "p.txt"
        p.write_text("0\n1\n2\n3\n")
        assert kv(run(capsys, "eval", "--input", str(g), "--perm", str(p))[1])["beta"] == "0.0"

    def test_triangle(self, tmp_path, capsys):
        g = tmp_path / "g.txt"
        g.write_text("0 1\n1 2\n2 0\n")
        p = tmp_path / "p.txt"
        p.write_text("2\n0\n1\n")
        beta = float(kv(run(capsys, "eval", "--input", str(g), "--perm", str(p))[1])["beta"])
        assert beta == pytest.approx(1 / 3)

    def test_missing_id_named(self, tmp_path, capsys):
        p = tmp_path / "p.txt"
        p.write_text("0\n1\n2\n")
        code, _, err = run(capsys, "eval", "--input", STAR, "--perm", str(p))
        assert code == 2 and "missing 1 node id(s): 3" in err

    def test_duplicate_id_named(self, tmp_path, capsys):
        p = tmp_path / "p.txt"
        p.write_text("0\n1\n1\n3\n")
        code, _, err = run(capsys, "eval", "--input", STAR, "--perm", str(p))
        assert code == 2 and "node id 1 appears twice" in err


class TestBench:
    def write_suite(self, tmp_path, lines):
        s = tmp_path / "suite.txt"
        s.write_text("\n".join(lines) + "\n")
        return str(s)

    def test_pass_and_skip(self, tmp_path, capsys):
        suite = self.write_suite(tmp_path, [
            "# name path directed lo hi",
            "grid gen:grid:rows=20,cols=20 undirected 0 5",
            "star gen:star:leaves=50 undirected 0 10",
            "gone data/missing.txt directed 0 10",
        ])
        errs = tmp_path / "errors.txt"
        code, out, _ = run(capsys, "bench", "--suite", suite, "--error-samples", "100",
                           "--errors-out", str(errs))
        rep = kv(out)
        assert code == 0
        assert rep["entry.gone.status"] == "skipped"
        assert rep["summary.ok"] == "2" and rep["summary.skipped"] == "1"
        assert "time.slope" in rep
        curve = np.loadtxt(errs)
        assert np.all(curve >= 0) and np.all(np.diff(curve) >= 0)
        # stable, name-sorted order
        names = [k.split(".")[1] for k in rep if k.startswith("entry.")]
        assert names == sorted(names)

    def test_expectation_failure_exit_1(self, tmp_path, capsys):
        suite = self.write_suite(tmp_path, ["grid gen:grid:rows=10,cols=10 undirected 0 0.1"])
        code, out, _ = run(capsys, "bench", "--suite", suite, "--error-samples", "0")
        assert code == 1 and kv(out)["entry.grid.expected"] == "false"

    def test_jobs_merge_deterministically(self, tmp_path):
        entries = bench.load_manifest(self.write_suite(tmp_path, [
            "b gen:path:n=200,shuffle=1 undirected 0 64",
            "a gen:grid:rows=8,cols=8 undirected 0 64",
        ]))
        serial = bench.run_suite(entries)
        parallel = bench.run_suite(entries, jobs=2)
        assert [r["name"] for r in parallel] == ["a", "b"]
        assert [r["beta"] for r in serial] == [r["beta"] for r in parallel]

    def test_bad_manifest(self, tmp_path, capsys):
        suite = self.write_suite(tmp_path, ["only three fields"])
        assert run(capsys, "bench", "--suite", suite)[0] == 2


def test_scaling_slope_recovers_power():
    sizes = np.array([1e3, 1e4, 1e5])
    assert bench.scaling_slope(sizes, 2e-6 * sizes ** 1.1) == pytest.approx(1.1)


def test_generate_to_stdout(capsys):
    code, out, _ = run(capsys, "generate", "path:n=3")
    assert code == 0 and out == "0 1\n1 2\n"


def test_console_entry_point():
    r = subprocess.run([sys.executable, "-m", "logarrange.cli", "solve", "--input", STAR],
                       capture_output=True, text=True)
    assert r.returncode == 0 and "cost=1.0" in r.stdout
