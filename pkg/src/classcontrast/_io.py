"""Small serialization helpers shared by the result writers."""

from __future__ import annotations

import csv
import io
import json
import subprocess
from functools import lru_cache
from pathlib import Path

import numpy as np

SIG_DIGITS = 12


def fmt(v) -> str:
    """Number to text with 12 significant digits; ints and bools stay exact."""
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if v == 0.0:
        return "0"
    return format(v, f".{SIG_DIGITS}g")


def round_sig(v: float) -> float:
    return float(fmt(v))


def jsonable(obj):
    """Recursively round floats to 12 significant digits for JSON output."""
    if isinstance(obj, dict):
        return {str(k): jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        return v if not np.isfinite(v) else round_sig(v)
    if isinstance(obj, Path):
        return str(obj)
    return obj


def dump_json(path, payload) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(jsonable(payload), fh, indent=2, sort_keys=False)
        fh.write("\n")


@lru_cache(maxsize=1)
def build_version() -> str:
    """``git describe`` of the source tree when available, else the package version."""
    from . import __version__

    try:
        here = Path(__file__).resolve().parent
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=here, capture_output=True, text=True, timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def meta_lines(meta: dict) -> list[str]:
    lines = [f"build: {build_version()}"]
    for k, v in meta.items():
        if isinstance(v, (list, tuple)):
            v = ",".join(str(x) for x in v)
        lines.append(f"{k}: {v}")
    return lines


def write_csv(path, header, rows, meta: dict | None = None) -> None:
    """CSV with ``#``-prefixed metadata lines ahead of the header row."""
    buf = io.StringIO()
    for line in meta_lines(meta or {}):
        buf.write(f"# {line}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(v) if isinstance(v, (int, float, np.number, np.bool_)) else v for v in row])
    Path(path).write_text(buf.getvalue(), encoding="utf-8")


def read_csv(path) -> tuple[list[str], list[list[str]], dict]:
    """Inverse of :func:`write_csv`: header, rows, metadata."""
    meta = {}
    body = []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition(":")
                meta[key.strip()] = val.strip()
            elif line.strip():
                body.append(line)
    rows = list(csv.reader(body))
    if not rows:
        raise ValueError(f"{path}: missing header row")
    return rows[0], rows[1:], meta
