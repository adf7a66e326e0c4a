import csv
import io
import json
import subprocess
import sys

import pytest

from newcomb_bell.cli import run


def call(*argv):
    buf = io.StringIO()
    code = run(list(argv), stdout=buf)
    return code, buf.getvalue()


def as_json(*argv):
    code, out = call(*argv, "--format", "json")
    assert code == 0
    return json.loads(out)


def rows(report, section):
    return next(s["rows"] for s in report["sections"] if s["name"] == section)


class TestScenario:
    def test_smoking_gene(self):
        rep = as_json("scenario", "smoking-gene")
        eu = {r["action"]: r for r in rows(rep, "expected utilities")}
        assert eu["S"]["eu"] == pytest.approx(-19, abs=1e-9)
        assert eu["~S"]["eu"] == pytest.approx(-2, abs=1e-9)
        assert rep["facts"]["bdt"] == "~S"
        assert rep["facts"]["cdt"] == "S"
        assert rep["facts"]["newcomb_type"] is True

    def test_smoking_table(self):
        code, out = call("scenario", "smoking-gene")
        assert code == 0
        assert "-19.000000000" in out and "-2.000000000" in out

    def test_newcomb(self):
        rep = as_json("scenario", "newcomb", "--p1", "0.99", "--p2", "0.01")
        eu = {r["action"]: r["eu"] for r in rows(rep, "expected utilities")}
        assert eu["A1"] == pytest.approx(990_000, abs=1e-6)

    def test_million_box(self):
        rep = as_json("scenario", "million-box", "--boxes", "1000000", "--accuracy", "0.999")
        r = {x["action"]: x for x in rows(rep, "expected utilities")}
        assert r["closed"]["ceu"] == pytest.approx(1.0, rel=1e-6)
        assert r["closed"]["eu"] == pytest.approx(999_000, rel=1e-6)

    @pytest.mark.parametrize("argv", [
        ("scenario", "newcomb", "--p1", "1.2"),
        ("scenario", "newcomb", "--p1", "1.2", "--p2", "0.1"),
        ("scenario", "no-such-scenario"),
        ("scenario", "million-box"),
        ("scenario", "smoking-gene", "--p-gene", "abc"),
    ])
    def test_usage_errors(self, argv, capsys):
        code, _ = call(*argv)
        assert code == 2
        assert "error" in capsys.readouterr().err

    def test_invalid_probability_message(self, capsys):
        assert call("scenario", "newcomb", "--p1", "1.2", "--p2", "0.1")[0] == 2
        assert "InvalidProbability" in capsys.readouterr().err


class TestBellGame:
    def test_cdt_declines(self):
        rep = as_json("bell-game", "--agent", "cdt", "--epsilon", "0.1", "--sessions", "100")
        (row,) = rows(rep, "ledger")
        assert row["total"] == 100_000
        assert row["declines"] == 100 and row["plays"] == 0

    def test_forced_lhv(self):
        rep = as_json("bell-game", "--agent", "bdt", "--mechanism", "lhv", "--sessions", "10")
        (row,) = rows(rep, "ledger")
        assert row["plays"] == 10 and row["wins"] == 0

    @pytest.mark.parametrize("argv", [
        ("--epsilon", "1.5"),
        ("--pairs", "0"),
        ("--threshold", "9"),
        ("--agent", "oracle"),
        ("--mechanism", "magic"),
        ("--sessions", "0"),
        ("--seed", "-3"),
    ])
    def test_bad_flags(self, argv):
        assert call("bell-game", *argv)[0] == 2

    def test_sessions_csv_and_transcripts(self, tmp_path):
        sess = tmp_path / "s.csv"
        tdir = tmp_path / "t"
        code, _ = call("bell-game", "--agent", "cdt", "bdt", "--pairs", "200", "--sessions", "3",
                       "--sessions-csv", str(sess), "--transcripts", str(tdir))
        assert code == 0
        lines = sess.read_text().splitlines()
        table = list(csv.reader(lines))
        assert table[0] == ["agent", "session", "decision", "f_statistic", "payout", "won"]
        assert len(table) == 1 + 6
        files = sorted(p.name for p in tdir.iterdir())
        assert len(files) == 6
        bdt = (tdir / "bdt_session0000.csv").read_text().splitlines()
        assert bdt[0] == "pair_index,alice_colour,charlie_colour,product"
        assert len(bdt) == 202

    def test_byte_identical_reruns(self, tmp_path):
        outs = []
        for k in range(2):
            d = tmp_path / str(k)
            code, _ = call("bell-game", "--agent", "cdt", "bdt", "--pairs", "500", "--sessions", "5",
                           "--seed", "7", "--format", "csv", "--output-dir", str(d))
            assert code == 0
            outs.append({p.name: p.read_bytes() for p in d.iterdir()})
        assert outs[0] == outs[1]
        assert set(outs[0]) == {"bell-game.csv", "bell-game-sessions.csv"}

    def test_seed_changes_output(self):
        a = call("bell-game", "--agent", "bdt", "--pairs", "500", "--sessions", "3", "--seed", "1",
                 "--format", "csv")[1]
        b = call("bell-game", "--agent", "bdt", "--pairs", "500", "--sessions", "3", "--seed", "2",
                 "--format", "csv")[1]
        assert a != b


class TestConfig:
    def test_file_values_and_override(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"agent": ["cdt"], "epsilon": 0.0, "sessions": 4, "pairs": 100}))
        rep = as_json("bell-game", "--config", str(cfg))
        (row,) = rows(rep, "ledger")
        assert row["plays"] == 4
        rep = as_json("bell-game", "--config", str(cfg), "--epsilon", "0.5")
        (row,) = rows(rep, "ledger")
        assert row["plays"] == 0 and row["sessions"] == 4

    def test_dashed_keys(self, tmp_path):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps({"p-gene": 0.3}))
        rep = as_json("scenario", "smoking-gene", "--config", str(cfg))
        assert rep["facts"]["cdt"] == "S"

    @pytest.mark.parametrize("content", [
        {"bogus": 1},
        {"epsilon": {"nested": 1}},
        {"epsilon": 2.0},
        {"output": "x"},
        [1, 2],
    ])
    def test_rejected(self, tmp_path, content):
        cfg = tmp_path / "c.json"
        cfg.write_text(json.dumps(content))
        assert call("bell-game", "--config", str(cfg))[0] == 2

    def test_missing_file(self, tmp_path):
        assert call("bounds", "--config", str(tmp_path / "none.json"))[0] == 2


class TestEnumerateAndBounds:
    def test_enumerate(self):
        rep = as_json("enumerate-lhv")
        strategies = rows(rep, "strategies")
        assert len(strategies) == 16
        assert max(r["F"] for r in strategies) == 2
        assert all(abs(r["F"]) == 2 for r in strategies)

    def test_bounds(self):
        rep = as_json("bounds", "--epsilon-grid", "0,0.1,1", "--threshold", "2.8")
        b = {r["epsilon"]: r["bound"] for r in rows(rep, "bound")}
        assert b[0.0] == pytest.approx(2.8284271, abs=1e-7)
        assert b[0.1] == pytest.approx(2.7455844, abs=1e-7)
        assert b[1.0] == pytest.approx(2.0, abs=1e-12)
        eps_star = next(v for k, v in rep["facts"].items() if k.startswith("break_even"))
        assert eps_star == pytest.approx(0.0343146, abs=1e-6)

    def test_bounds_table_text(self):
        code, out = call("bounds", "--epsilon-grid", "0.1")
        assert code == 0 and "2.745584412" in out

    @pytest.mark.parametrize("grid", ["1.5", "x", ","])
    def test_bad_grid(self, grid):
        assert call("bounds", "--epsilon-grid", grid)[0] == 2


def test_output_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("NEWCOMB_BELL_OUTPUT_DIR", str(tmp_path))
    code, out = call("enumerate-lhv", "--format", "csv")
    assert code == 0
    assert (tmp_path / "enumerate-lhv.csv").read_text() == out


def test_output_file(tmp_path):
    target = tmp_path / "sub" / "r.json"
    code, out = call("bounds", "--format", "json", "--output", str(target))
    assert code == 0 and out == ""
    json.loads(target.read_text())


def test_repro_runs():
    code, out = call("repro", "--sessions", "2", "--pairs", "1000")
    assert code == 0
    assert "2.828427125" in out and "0.034314575" in out


def test_internal_error_exit_code(monkeypatch):
    import newcomb_bell.cli as cli

    def boom(args):
        raise RuntimeError("boom")

    monkeypatch.setitem(cli.COMMANDS, "enumerate-lhv", boom)
    assert call("enumerate-lhv")[0] == 1


def test_entry_point_subprocess():
    proc = subprocess.run(
        [sys.executable, "-m", "newcomb_bell.cli", "scenario", "newcomb", "--p1", "1.2"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 2
    proc = subprocess.run(
        [sys.executable, "-m", "newcomb_bell.cli", "enumerate-lhv", "--format", "csv"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.count("\n") >= 17
