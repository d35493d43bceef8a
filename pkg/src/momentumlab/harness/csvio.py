"""Deterministic CSV trajectory export and atomic file writes."""

import csv
import io
import math
import os
import tempfile

CSV_HEADER = (
    "step", "t", "loss", "pseudo_loss", "residual_norm",
    "max_displacement", "lambda_min_H", "lyapunov", "bound",
)


def _fmt(value):
    if value is None:
        return ""
    value = float(value)
    if math.isnan(value):
        return ""
    return repr(value)


def trajectory_csv_text(records, bound_fn=None):
    """Render records to RFC-4180 CSV text (one row per recorded point)."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(CSV_HEADER)
    for rec in records:
        bound = bound_fn(rec.t) if bound_fn is not None else None
        writer.writerow([
            str(int(rec.step)),
            _fmt(rec.t),
            _fmt(rec.loss),
            _fmt(rec.pseudo_loss),
            _fmt(rec.residual_norm),
            _fmt(rec.max_displacement),
            _fmt(rec.lambda_min_H),
            _fmt(rec.lyapunov),
            _fmt(bound),
        ])
    return buf.getvalue()


def atomic_write_text(path, text):
    """Write-temp-then-rename so concurrent readers never see partial files."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def write_trajectory_csv(path, records, bound_fn=None):
    atomic_write_text(path, trajectory_csv_text(records, bound_fn))
