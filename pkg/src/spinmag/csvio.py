"""Deterministic CSV output.

Header row, '.' decimal point, floats at 9 significant digits, fixed
\\n line endings.  Identical data must serialize to identical bytes on
every platform, since reruns are compared byte for byte.
"""

from __future__ import annotations

import csv
import io
import os


def format_value(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return "%.9g" % value
    return str(value)


def render_csv(header, rows) -> str:
    """CSV text for a header and an iterable of row sequences."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_value(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    text = render_csv(header, rows)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(text)


def write_tables(out_dir, tables: dict) -> list[str]:
    """Write {filename: (header, rows)} under out_dir; returns paths written."""
    os.makedirs(out_dir, exist_ok=True)
    paths = []
    for name, (header, rows) in tables.items():
        path = os.path.join(out_dir, name)
        write_csv(path, header, rows)
        paths.append(path)
    return paths
