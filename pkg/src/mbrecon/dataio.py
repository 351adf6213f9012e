"""File formats: whitespace-separated series files and CSV emission.

Series files carry one sample per line, either a single float (scalar
series) or two whitespace-separated floats (planar series).  Lines starting
with ``#`` and blank lines are skipped.  Column counts may not vary within
a file.  All floats are written with round-trip precision (``repr``), so a
write/read cycle is lossless.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, Sequence, Union

from .errors import MixedColumnCount, ParseError
from .generators import TimeSeries, TimeSeries2D


def format_float(value: float) -> str:
    return repr(float(value))


def read_series(path) -> Union[TimeSeries, TimeSeries2D]:
    """Parse a series file; dimensionality is inferred from the column count."""
    rows = []
    width = None
    with open(path, "r", encoding="ascii") as fh:
        for line_no, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            if width is None:
                width = len(parts)
                if width not in (1, 2):
                    raise ParseError(line_no, raw.rstrip("\n"))
            elif len(parts) != width:
                raise MixedColumnCount(line_no, width, len(parts))
            try:
                rows.append([float(p) for p in parts])
            except ValueError:
                raise ParseError(line_no, raw.rstrip("\n")) from None
    if not rows:
        raise ParseError(0, "<empty file>")
    name = Path(path).name
    if width == 1:
        return TimeSeries([r[0] for r in rows], label=name)
    return TimeSeries2D(rows, label=name)


def write_series(series: Union[TimeSeries, TimeSeries2D], path) -> None:
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        if isinstance(series, TimeSeries):
            for v in series.values:
                fh.write(format_float(v) + "\n")
        else:
            for x1, x2 in series.values:
                fh.write(f"{format_float(x1)} {format_float(x2)}\n")


def write_csv(path, header: Sequence[str], rows: Iterable[Sequence]) -> None:
    """One header row then data rows, LF endings, round-trip float precision."""
    with open(path, "w", encoding="ascii", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(list(header))
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, float) else v
                             for v in row])


def write_manifest(path, entries: dict) -> None:
    """Plain-text key=value run manifest, keys sorted for determinism."""
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for key in sorted(entries):
            fh.write(f"{key}={entries[key]}\n")
