import numpy as np
import pytest

from covertlab.exceptions import InvalidInputError
from covertlab.experiments import SweepConfig, SweepRow, run_experiment
from covertlab.io import (
    CSV_HEADER,
    emit_csv,
    emit_diagnostics,
    emit_roc,
    fmt,
    load_transcript,
    read_csv,
    save_transcript,
)
from covertlab.warden import min_error_from_stats


def _row():
    s0, s1 = np.arange(100.0), np.arange(100.0) + 30
    reps = [min_error_from_stats(s0, s1, "radiometer[sigma_w2]"),
            min_error_from_stats(-s0, -s1, "lrt[n+q+a+sigma_w2]")]
    return SweepRow(experiment="sqrt_awgn", n=1000, total_power=31.6227766, bits_k=3.14159265,
                    bob_err=0.0123456789, bob_ci=0.00123, detectors=reps,
                    pinsker_floor=0.64704123, seed=7, trials=100, wall_s=1.25,
                    samples={"radiometer[sigma_w2]": (s0, s1)})


def test_one_row_two_detectors(tmp_path):
    path = emit_csv([_row()], tmp_path / "out.csv")
    lines = path.read_text().splitlines()
    assert lines[0] == ",".join(CSV_HEADER)
    assert len(lines) == 3
    assert lines[1].endswith(",7,NA")


def test_wall_time_opt_in(tmp_path):
    path = emit_csv([_row()], tmp_path / "out.csv", wall_time=True)
    assert path.read_text().splitlines()[1].endswith(",7,1.25")


def test_parse_back_six_digits(tmp_path):
    row = _row()
    recs = read_csv(emit_csv([row], tmp_path / "out.csv"))
    rec = recs[0]
    assert rec["n"] == 1000 and rec["seed"] == 7 and rec["wall_s"] is None
    for key, value in [("total_power", row.total_power), ("bits_k", row.bits_k),
                       ("bob_err", row.bob_err), ("pinsker_floor", row.pinsker_floor),
                       ("det_ci", row.detectors[0].ci_halfwidth)]:
        assert rec[key] == pytest.approx(value, rel=5e-6)
    assert [r["detector"] for r in recs] == ["radiometer[sigma_w2]", "lrt[n+q+a+sigma_w2]"]


def test_rerun_byte_identical(tmp_path):
    cfg = SweepConfig("sqrt_bsc", n_grid=(1000,), trials=200)
    a = emit_csv(run_experiment(cfg), tmp_path / "a.csv").read_bytes()
    b = emit_csv(run_experiment(cfg, jobs=2), tmp_path / "b.csv").read_bytes()
    assert a == b


def test_fmt():
    assert fmt(3) == "3"
    assert fmt(0.1234567) == "0.123457"
    assert fmt(-0.0) == "0"
    assert fmt(float("nan")) == "nan"


def test_unwritable_path(tmp_path):
    with pytest.raises(OSError):
        emit_csv([_row()], tmp_path / "missing" / "out.csv")


def test_read_rejects_foreign_header(tmp_path):
    (tmp_path / "x.csv").write_text("a,b\n1,2\n")
    with pytest.raises(InvalidInputError):
        read_csv(tmp_path / "x.csv")


def test_diagnostics_and_roc(tmp_path):
    diag = emit_diagnostics([_row()], tmp_path / "d.csv").read_text().splitlines()
    assert diag[0].startswith("experiment,n,detector,trials,failures") and len(diag) == 3
    roc = emit_roc([_row()], tmp_path / "r.csv").read_text().splitlines()
    assert roc[1].split(",")[-2:] == ["1", "1"]


def test_transcript_roundtrip(tmp_path):
    y = np.random.default_rng(0).standard_normal(20)
    save_transcript("awgn", y, tmp_path / "t.txt")
    kind, back = load_transcript(tmp_path / "t.txt")
    assert kind == "awgn" and np.array_equal(back, y)
    save_transcript("bsc", [0, 1, 1], tmp_path / "b.txt")
    assert load_transcript(tmp_path / "b.txt")[1].tolist() == [0, 1, 1]


@pytest.mark.parametrize("text", ["awgn n=3\n1 2\n", "qam n=1\n1\n", "bsc n=2\n0 2\n", "awgn\n1\n",
                                  "awgn n=1\nx\n"])
def test_transcript_errors(tmp_path, text):
    (tmp_path / "t.txt").write_text(text)
    with pytest.raises(InvalidInputError):
        load_transcript(tmp_path / "t.txt")
