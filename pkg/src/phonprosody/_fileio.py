"""Small helpers for the text files the pipeline reads and writes."""
from __future__ import annotations

import csv
import io
import os
import tempfile
from pathlib import Path


def atomic_write_text(path, text: str) -> None:
    """Write ``text`` to ``path`` via a temporary file and rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def format_csv(header, rows, comments=None) -> str:
    """Render rows as CSV text with optional ``# key=value`` preamble lines."""
    buf = io.StringIO()
    for key, value in (comments or {}).items():
        buf.write(f"# {key}={value}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def write_csv(path, header, rows, comments=None) -> None:
    atomic_write_text(path, format_csv(header, rows, comments))


def read_csv(path):
    """Return ``(rows, comments)``; rows are dicts, comments the preamble."""
    comments = {}
    lines = []
    with open(path, encoding="utf-8", newline="") as fh:
        for line in fh:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                comments[key.strip()] = value.strip()
            else:
                lines.append(line)
    return list(csv.DictReader(lines)), comments


def fmt(x: float) -> str:
    """Shortest round-tripping representation of a float."""
    return repr(float(x))
