"""CSV reports: header row, comma separated, LF line endings, 15 significant digits."""
from __future__ import annotations

import csv
import io
import logging
import os
from typing import Iterable, Sequence

logger = logging.getLogger(__name__)

FLOAT_FORMAT = ".15g"


def format_cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, int):
        return str(value)
    if isinstance(value, float):
        # normalise -0.0 so identical runs stay byte-identical
        return format(value + 0.0, FLOAT_FORMAT)
    if isinstance(value, (tuple, list)):
        return ";".join(format_cell(v) for v in value)
    return str(value)


def render(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        if len(row) != len(header):
            raise ValueError(f"Invalid report row of {len(row)} cells; header has {len(header)}")
        writer.writerow([format_cell(v) for v in row])
    return buf.getvalue()


def write_csv(path: str, header: Sequence[str], rows: Iterable[Sequence]) -> str:
    """Write the report to ``path`` (parent directories created) and return its text."""
    text = render(header, rows)
    parent = os.path.dirname(path)
    if parent:
        os.makedirs(parent, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info("wrote %s", path)
    return text
