"""Command-line surface: formats, exit codes, determinism, parallelism."""

import csv
import json
import os
import subprocess
import sys

import pytest

from disperse_lab import cli


def run_cli(args, tmp_path, name="out", env_threads=None):
    out = tmp_path / name
    env = dict(os.environ)
    env.pop("DISPERSE_LAB_THREADS", None)
    if env_threads is not None:
        env["DISPERSE_LAB_THREADS"] = str(env_threads)
    proc = subprocess.run(
        [sys.executable, "-m", "disperse_lab.cli", *args, "--out", str(out)],
        capture_output=True, text=True, env=env)
    return proc, out


class TestFormats:
    def test_propagate_csv(self, tmp_path):
        proc, out = run_cli(["propagate", "--n", "3", "--profile",
                             "bump:a=1,b=2", "--t", "0.5,1.0",
                             "--x", "1:4:3"], tmp_path)
        assert proc.returncode == 0
        with open(out) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["n", "t", "x_abs", "re", "im", "abs", "err_est"]
        assert len(rows) == 1 + 2 * 3
        # 17 significant digits: text -> float -> text is lossless
        for row in rows[1:]:
            for cell in row[3:6]:
                assert float(cell) == float(repr(float(cell)))
        # sorted by (t, x)
        keys = [(float(r[1]), float(r[2])) for r in rows[1:]]
        assert keys == sorted(keys)

    def test_gate_json(self, tmp_path):
        proc, out = run_cli(["gate", "--n", "3", "--r", "2", "--p", "2",
                             "--q", "6"], tmp_path)
        assert proc.returncode == 0
        doc = json.loads(out.read_text())
        assert doc["permitted"] is True

    def test_norm_scan_marks_divergence(self, tmp_path):
        proc, out = run_cli(["norm", "--family", "power", "--n", "3",
                             "--which", "X", "--scan", "alpha=0.6:1.4:0.4"],
                            tmp_path)
        assert proc.returncode == 0
        with open(out) as fh:
            rows = list(csv.reader(fh))[1:]
        vals = {float(a): v for a, v in rows}
        assert vals[0.6] == "DIV"
        assert float(vals[1.4]) > 0


class TestExitCodes:
    def test_invalid_profile_is_two(self, tmp_path):
        proc, _ = run_cli(["propagate", "--n", "3", "--profile", "nosuch",
                           "--t", "1", "--x", "1"], tmp_path)
        assert proc.returncode == 2

    def test_empty_grid_is_two(self, tmp_path):
        proc, _ = run_cli(["norm", "--family", "power", "--n", "3",
                           "--which", "X", "--scan", "alpha=2:1:0.5"],
                          tmp_path)
        assert proc.returncode == 2

    def test_verify_fast_passes(self):
        proc = subprocess.run(
            [sys.executable, "-m", "disperse_lab.cli", "verify",
             "--suite", "fast"],
            capture_output=True, text=True)
        assert proc.returncode == 0
        lines = [l for l in proc.stdout.splitlines() if l.strip()]
        assert lines and all(l.startswith("PASS") for l in lines)


class TestDeterminism:
    def test_byte_identical_reruns(self, tmp_path):
        args = ["propagate", "--n", "3", "--profile", "gaussian:width=1",
                "--t", "0.5:2:3", "--x", "0.5:8:5"]
        _, out1 = run_cli(args, tmp_path, "a.csv")
        _, out2 = run_cli(args, tmp_path, "b.csv")
        assert out1.read_bytes() == out2.read_bytes()

    def test_thread_count_does_not_change_output(self, tmp_path):
        args = ["propagate", "--n", "3", "--profile", "bump:a=1,b=2",
                "--t", "0.5:2:3", "--x", "0.5:8:4"]
        _, out1 = run_cli(args, tmp_path, "t1.csv", env_threads=1)
        _, out2 = run_cli(args, tmp_path, "t4.csv", env_threads=4)
        assert out1.read_bytes() == out2.read_bytes()


class TestHelpers:
    def test_parse_grid_forms(self):
        assert list(cli._parse_grid("1,2,4")) == [1.0, 2.0, 4.0]
        g = cli._parse_grid("1:100:3")
        assert len(g) == 3 and g[0] == pytest.approx(1.0) \
            and g[-1] == pytest.approx(100.0)

    def test_emit_csv_rejects_empty(self, tmp_path):
        with pytest.raises(SystemExit):
            cli.emit_csv([], ["a"], str(tmp_path / "x.csv"))

    def test_float_formatting_roundtrip(self):
        for v in (1.0 / 3.0, 2.0 ** -40, 1e300):
            assert float(cli._fmt(v)) == v
