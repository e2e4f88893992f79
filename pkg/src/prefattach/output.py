"""CSV / JSON writers. Every file starts with a provenance comment."""
from __future__ import annotations

import csv
import json
from pathlib import Path


def provenance_line(digest: str, seed: int) -> str:
    return f"# config_sha256={digest} seed={seed}"


def _fmt(v):
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(path, header, rows, digest: str, seed: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="") as fh:
        fh.write(provenance_line(digest, seed) + "\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])
    return path


def write_json(path, payload: dict, digest: str, seed: int) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    doc = {"provenance": {"config_sha256": digest, "seed": seed}, **payload}
    path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return path


def read_csv(path):
    """Rows of a file written by :func:`write_csv` (comment line skipped)."""
    with Path(path).open() as fh:
        lines = [ln for ln in fh if not ln.startswith("#")]
    return list(csv.reader(lines))
