"""CSV emission and transcript files."""

from __future__ import annotations

import csv
import math
from pathlib import Path

import numpy as np

from .exceptions import InvalidInputError

CSV_HEADER = (
    "experiment", "n", "total_power", "bits_k", "bob_err", "bob_ci",
    "detector", "det_sum_err", "det_ci", "pinsker_floor", "seed", "wall_s",
)
DIAGNOSTICS_HEADER = (
    "experiment", "n", "detector", "trials", "failures", "pfa", "pmd",
    "threshold", "direction", "wall_s",
)


def fmt(value):
    """Six significant digits; integers stay integers."""
    if isinstance(value, (int, np.integer)) and not isinstance(value, bool):
        return str(int(value))
    value = float(value)
    if math.isnan(value):
        return "nan"
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    text = f"{value:.6g}"
    return "0" if text == "-0" else text


def emit_csv(rows, path, wall_time=False):
    """Write one line per (row, detector).

    ``wall_s`` is written as ``NA`` unless ``wall_time`` is set, because
    timings would make reruns differ byte for byte.
    """
    if not rows:
        raise ValueError("emit_csv needs at least one row")
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for row in rows:
            for rep in row.detectors:
                writer.writerow((
                    row.experiment, fmt(row.n), fmt(row.total_power), fmt(row.bits_k),
                    fmt(row.bob_err), fmt(row.bob_ci), rep.detector_name,
                    fmt(rep.sum_error), fmt(rep.ci_halfwidth), fmt(row.pinsker_floor),
                    fmt(row.seed), fmt(row.wall_s) if wall_time else "NA",
                ))
    return path


def emit_diagnostics(rows, path):
    """Per-detector appendix: trial and failure counts, operating point, timing."""
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(DIAGNOSTICS_HEADER)
        for row in rows:
            for rep in row.detectors:
                writer.writerow((
                    row.experiment, fmt(row.n), rep.detector_name, fmt(row.trials),
                    fmt(rep.failures), fmt(rep.pfa), fmt(rep.pmd), fmt(rep.threshold),
                    rep.direction, fmt(row.wall_s),
                ))
    return path


def emit_roc(rows, path):
    """ROC points for every (row, detector) whose raw statistics were kept."""
    from .warden import roc_points

    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(("experiment", "n", "detector", "threshold", "pfa", "pd"))
        for row in rows:
            for name, (s0, s1) in row.samples.items():
                thr, pfa, pd = roc_points(s0, s1)
                for t, f, d in zip(thr, pfa, pd):
                    writer.writerow((row.experiment, fmt(row.n), name, fmt(t), fmt(f), fmt(d)))
    return path


def read_csv(path):
    """Parse an emitted CSV back into dicts with numeric fields converted."""
    out = []
    with Path(path).open(newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != CSV_HEADER:
            raise InvalidInputError(f"{path}: unexpected header {reader.fieldnames}")
        for rec in reader:
            parsed = {}
            for key, value in rec.items():
                if key in ("experiment", "detector"):
                    parsed[key] = value
                elif value == "NA":
                    parsed[key] = None
                elif key in ("n", "seed"):
                    parsed[key] = int(value)
                else:
                    parsed[key] = float(value)
            out.append(parsed)
    return out


def save_transcript(kind, values, path):
    """Write ``awgn n=<n>`` or ``bsc n=<n>`` followed by the samples."""
    if kind not in ("awgn", "bsc"):
        raise InvalidInputError(f"unknown transcript kind {kind!r}")
    values = np.asarray(values)
    body = " ".join(repr(float(v)) for v in values) if kind == "awgn" else \
        " ".join(str(int(v)) for v in values)
    Path(path).write_text(f"{kind} n={values.size}\n{body}\n")


def load_transcript(path):
    """Return ``(kind, values)`` from a transcript file, checking the announced length."""
    text = Path(path).read_text()
    header, _, body = text.partition("\n")
    parts = header.split()
    if len(parts) != 2 or parts[0] not in ("awgn", "bsc") or not parts[1].startswith("n="):
        raise InvalidInputError(f"{path}: first line must be 'awgn n=<n>' or 'bsc n=<n>'")
    kind = parts[0]
    try:
        n = int(parts[1][2:])
        tokens = body.split()
        if kind == "awgn":
            values = np.array([float(t) for t in tokens])
        else:
            values = np.array([int(t) for t in tokens], dtype=np.int64)
    except ValueError as exc:
        raise InvalidInputError(f"{path}: {exc}") from exc
    if values.size != n:
        raise InvalidInputError(f"{path}: header announces n={n}, found {values.size} samples")
    if kind == "bsc" and values.size and not np.isin(values, (0, 1)).all():
        raise InvalidInputError(f"{path}: bsc transcripts hold only 0 and 1")
    return kind, values
