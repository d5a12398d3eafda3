"""CSV/JSON serialisation of witness series, run manifests and atomic file writes."""

from __future__ import annotations

import csv
import io
import json
import os
import tempfile
from pathlib import Path

from . import __version__
from .sweep import GRID_NOTE, INDEX_CONVENTION, WitnessSeries

CSV_HEADER = ("gt", "witness", "value", "mode", "lambda_family", "nbar", "k", "q")


def fmt(x) -> str:
    """12 significant digits; empty for missing values."""
    if x is None:
        return ""
    return format(float(x), ".12g")


def _rows(series_list):
    for s in series_list:
        c = s.config
        for sample, value in zip(s.rows, s.values()):
            yield {
                "gt": sample.gt,
                "witness": s.witness,
                "value": value,
                "mode": s.mode,
                "lambda_family": c.family.value,
                "nbar": c.nbar,
                "k": c.k,
                "q": c.q,
            }


def emit_csv(series_list: list[WitnessSeries]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for row in _rows(series_list):
        w.writerow(fmt(row[key]) if key not in ("witness", "mode", "lambda_family") else row[key] for key in CSV_HEADER)
    return buf.getvalue()


def parse_csv(text: str) -> list[dict]:
    """Inverse of :func:`emit_csv`; numeric columns come back as float or None."""
    rows = []
    reader = csv.DictReader(io.StringIO(text))
    if tuple(reader.fieldnames or ()) != CSV_HEADER:
        raise ValueError(f"unexpected CSV header {reader.fieldnames}")
    for rec in reader:
        row = dict(rec)
        for key in ("gt", "value", "nbar", "k", "q"):
            row[key] = float(rec[key]) if rec[key] != "" else None
        rows.append(row)
    return rows


def _rounded(x):
    return None if x is None else float(fmt(x))


def emit_json(series_list: list[WitnessSeries], manifest: dict | None = None) -> str:
    rows = [{k: _rounded(v) if k in ("gt", "value", "nbar", "k", "q") else v for k, v in row.items()} for row in _rows(series_list)]
    doc = {"rows": rows}
    if manifest is not None:
        doc["manifest"] = manifest
    return json.dumps(doc, indent=2) + "\n"


def build_manifest(command: str, configs: dict, outputs: list[str], duration_s: float | None = None) -> dict:
    """Everything needed to rerun: tool version, resolved configs, conventions, files."""
    m = {
        "tool": "ifscavity",
        "version": __version__,
        "command": command,
        "configs": configs,
        "index_convention": INDEX_CONVENTION,
        "grid_note": GRID_NOTE,
        "mode_notes": {
            "paper": "printed closed forms (resonant form for k = 0, lossy form for k > 0)",
            "oracle": "fixed-step RK4 solution of the amplitude equations of motion",
            "paper_lossy_caveat": "lossy closed form kept verbatim: mixed dimensions, no k -> 0 reduction",
        },
        "outputs": sorted(outputs),
    }
    if duration_s is not None:
        m["duration_s"] = round(duration_s, 6)
    return m


def write_atomic(path, text: str) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
