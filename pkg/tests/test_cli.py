import json

import pytest

from citedisrupt.cli import load_prize_file, main, read_config_file, ValidationError, write_atomic
from citedisrupt.experiments import MetricTable


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


def test_ingest_summary(capsys, e1_files):
    nodes, edges = e1_files
    code, out, _ = run(capsys, "ingest", "--nodes", nodes, "--edges", edges)
    assert code == 0
    assert out.strip() == "6 nodes, 6 edges, 0 dropped"


def test_ingest_reports_dropped(capsys, tmp_path, e1_files):
    nodes, _ = e1_files
    edges = tmp_path / "dup.csv"
    edges.write_text("citing,cited\nv,x\nv,x\nv,v\n")
    code, out, err = run(capsys, "ingest", "--nodes", nodes, "--edges", edges)
    assert out.strip() == "6 nodes, 1 edges, 2 dropped"
    assert "self-citations dropped: 1" in err


def test_compute_e1_golden(capsys, tmp_path, e1_files):
    nodes, edges = e1_files
    out = tmp_path / "t.csv"
    args = ["compute", "--nodes", nodes, "--edges", edges, "--years", "2001:2001", "--h", "all",
            "--out", out, "--manifest", tmp_path / "m.json"]
    for m in ("citations", "cd", "cdnok", "distar", "bcd", "bnk", "shift"):
        args += ["--measure", m]
    assert run(capsys, *args)[0] == 0
    cells = {r.measure.value: r.value for r in MetricTable.from_csv(out.read_text()).records}
    assert cells == {"citations": 2, "cd": 0, "cdnok": 0, "distar": 1 / 3,
                     "bcd": 0.5, "bnk": 0.75, "shift": 0.5}
    manifest = json.loads((tmp_path / "m.json").read_text())
    assert manifest["command"] == "compute"
    assert len(manifest["inputs"]) == 2 and len(manifest["outputs"]) == 1
    assert set(manifest["stage_seconds"]) >= {"load", "compute", "total"}


def test_compute_without_years_names_the_node(capsys, tmp_path, e1_files):
    _, edges = e1_files
    nodes = tmp_path / "n.csv"
    nodes.write_text("id,year\nx,2000\ny,\nv,2001\na,2002\nb,2002\nc,2002\n")
    code, _, err = run(capsys, "compute", "--nodes", nodes, "--edges", edges,
                       "--measure", "cd", "--h", "5", "--years", "1990:1995")
    assert code == 1
    assert "'y'" in err


def test_usage_errors(capsys, e1_files):
    nodes, edges = e1_files
    code, _, err = run(capsys, "compute", "--nodes", nodes, "--edges", edges, "--bogus")
    assert code == 2
    assert "--measure" in err
    assert run(capsys, "frobnicate")[0] == 2
    assert run(capsys, "compute", "--nodes", nodes, "--edges", edges, "--k", "0")[0] == 2


def test_malformed_csv_exit_1(capsys, tmp_path, e1_files):
    _, edges = e1_files
    bad = tmp_path / "n.csv"
    bad.write_text("id,year\na,soon\n")
    code, _, err = run(capsys, "ingest", "--nodes", bad, "--edges", edges)
    assert code == 1
    assert "n.csv:2" in err


def test_slice_and_neighborhood_export(capsys, tmp_path, e1_files):
    nodes, edges = e1_files
    code, out, _ = run(capsys, "slice", "--nodes", nodes, "--edges", edges, "--t", "2000", "--h", "1")
    assert out.splitlines() == ["citing,cited", "v,x", "v,y"]
    labels = tmp_path / "l.csv"
    code, out, _ = run(capsys, "slice", "--nodes", nodes, "--edges", edges, "--t", "2002",
                       "--h", "0", "--focal", "v", "--out-labels", labels)
    assert code == 0 and len(out.splitlines()) == 7
    assert "b,J" in labels.read_text()
    code, _, _ = run(capsys, "slice", "--nodes", nodes, "--edges", edges, "--t", "2002",
                     "--focal", "v", "--kind", "ego", "--out-labels", labels)
    assert code == 1


def _table_file(capsys, tmp_path, e1_files):
    nodes, edges = e1_files
    out = tmp_path / "t.csv"
    run(capsys, "compute", "--nodes", nodes, "--edges", edges, "--years", "2000:2002",
        "--h", "all", "--k", "1", "--out", out)
    return out


def test_correlate_trend_rank(capsys, tmp_path, e1_files):
    table = _table_file(capsys, tmp_path, e1_files)
    code, out, _ = run(capsys, "correlate", "--table", table, "--corr-method", "pearson")
    assert code == 0 and out.startswith(",citations:h=all,")
    series = tmp_path / "s.csv"
    code, out, _ = run(capsys, "trend", "--table", table, "--window", "3", "--series-corr", series)
    assert code == 0
    assert out.splitlines()[0] == "year,measure,k,h,mean_value,smoothed_value"
    assert series.exists()
    prizes = tmp_path / "p.txt"
    prizes.write_text("# prize papers\nv\nv\nnot-there\n")
    code, out, err = run(capsys, "rank", "--table", table, "--prizes", prizes)
    assert code == 0
    assert out.splitlines()[0] == "measure,k,h,amr_percent,stdev_percent,n_ranked,n_skipped"
    assert "1 prize id(s) not found" in err
    prizes.write_text("nobody\n")
    assert run(capsys, "rank", "--table", table, "--prizes", prizes)[0] == 1


def test_outputs_are_deterministic(capsys, tmp_path, e1_files):
    nodes, edges = e1_files
    outs = []
    for threads in ("1", "3"):
        out = tmp_path / f"t{threads}.csv"
        run(capsys, "compute", "--nodes", nodes, "--edges", edges, "--years", "2000:2002",
            "--k", "1", "--k", "all", "--threads", threads, "--out", out)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_verify(capsys):
    code, out, _ = run(capsys, "verify", "--seeds", "5")
    body = json.loads(out)
    assert code == 0
    assert body["failed"] == 0 and body["checks"] == 40


def test_config_file_and_override(capsys, tmp_path, e1_files):
    nodes, edges = e1_files
    cfg = tmp_path / "run.cfg"
    cfg.write_text("# defaults\nmeasure = cd, citations\nh = all\nyears = 2001:2001\n")
    code, out, _ = run(capsys, "compute", "--nodes", nodes, "--edges", edges, "--config", cfg)
    assert code == 0
    assert [l.split(",")[2] for l in out.splitlines()[1:]] == ["citations", "cd"]
    code, out, _ = run(capsys, "compute", "--nodes", nodes, "--edges", edges, "--config", cfg,
                       "--measure", "distar")
    assert [l.split(",")[2] for l in out.splitlines()[1:]] == ["distar"]
    cfg.write_text("colour = red\n")
    assert run(capsys, "compute", "--nodes", nodes, "--edges", edges, "--config", cfg)[0] == 1
    cfg.write_text("no equals sign\n")
    with pytest.raises(ValidationError, match="run.cfg:1"):
        read_config_file(cfg)


def test_load_prize_file(tmp_path):
    p = tmp_path / "p.txt"
    p.write_text("")
    empty = load_prize_file(p, {"a"})
    assert empty.ids == set() and empty.warnings
    p.write_text("a\nb # winner\nzz\nb\n")
    got = load_prize_file(p, {"a", "b"})
    assert got.ids == {"a", "b"} and got.unknown == ["zz"]
    with pytest.raises(ValidationError):
        load_prize_file(tmp_path / "missing.txt")


def test_write_atomic_replaces(tmp_path):
    target = tmp_path / "out.csv"
    target.write_text("old")
    write_atomic(target, "new")
    assert target.read_text() == "new"
    assert [p.name for p in tmp_path.iterdir()] == ["out.csv"]
