import numpy as np

from covertlab.cli import main
from covertlab.io import read_csv, save_transcript


def _cfg(tmp_path):
    path = tmp_path / "tiny.cfg"
    path.write_text("experiment = sqrt_awgn\nn_grid = 1000\ntrials = 200\n")
    return path


def test_run_writes_csv_and_sidecars(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["run", str(_cfg(tmp_path)), "--out", str(out), "--roc"]) == 0
    recs = read_csv(out / "tiny.csv")
    assert len(recs) == 2 and recs[0]["seed"] == 1 and recs[0]["wall_s"] is None
    assert (out / "tiny_diagnostics.csv").exists() and (out / "tiny_roc.csv").exists()
    assert "wrote" in capsys.readouterr().out


def test_run_overrides(tmp_path):
    out = tmp_path / "out"
    main(["run", str(_cfg(tmp_path)), "--out", str(out), "--seed", "9", "--trials", "150",
          "--wall-time"])
    rec = read_csv(out / "tiny.csv")[0]
    assert rec["seed"] == 9 and rec["wall_s"] is not None


def test_run_jobs_byte_identical(tmp_path):
    cfg = _cfg(tmp_path)
    main(["run", str(cfg), "--out", str(tmp_path / "a")])
    main(["run", str(cfg), "--out", str(tmp_path / "b"), "--jobs", "2"])
    assert (tmp_path / "a" / "tiny.csv").read_bytes() == (tmp_path / "b" / "tiny.csv").read_bytes()


def test_run_bad_config_reports_field(tmp_path, capsys):
    bad = tmp_path / "bad.cfg"
    bad.write_text("experiment = sqrt_bsc\np_b = 0.2\np_w = 0.1\n")
    assert main(["run", str(bad), "--out", str(tmp_path)]) == 2
    err = capsys.readouterr().err
    assert "mode" in err and "p_w > p_b" in err


def test_detect_awgn(tmp_path, capsys):
    y = np.random.default_rng(3).standard_normal(5000)
    save_transcript("awgn", y, tmp_path / "t.txt")
    assert main(["detect", str(tmp_path / "t.txt"), "--sigma-w2", "1", "--q", "0.014",
                 "--a", "1", "--threshold", "5"]) == 0
    out = capsys.readouterr().out
    assert "radiometer:" in out and "p-value" in out and "lrt:" in out and "silence" in out


def test_detect_bsc(tmp_path, capsys):
    bits = np.ones(100, dtype=int)
    save_transcript("bsc", bits, tmp_path / "b.txt")
    main(["detect", str(tmp_path / "b.txt"), "--p-w", "0.2", "--threshold", "30"])
    out = capsys.readouterr().out
    assert "count: 100" in out and "transmission" in out


def test_detect_missing_file(tmp_path, capsys):
    assert main(["detect", str(tmp_path / "nope.txt")]) == 2


def test_demo(capsys):
    assert main(["demo", "--n", "4000", "--seed", "3"]) == 0
    out = capsys.readouterr().out
    assert "bob decoded" in out and "willie radiometer" in out
