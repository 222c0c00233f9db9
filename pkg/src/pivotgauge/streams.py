"""NDJSON frame streams and CSV emission.

Frame stream format: the first line is a header object
``{"rows", "cols", "pitch", "origin"}``; every following line is one frame
``{"t": seconds, "d": [[dx, dy, dz], ...]}`` in row-major marker order.
Floats are serialized with full round-trip precision, so piping a stream
through a file reproduces bit-identical values.

CSV output is RFC-4180-style with a header row, ``.`` decimal separator
and 6 significant digits for all numeric columns.
"""

from __future__ import annotations

import json
import math
import sys
from typing import IO, Iterable, Iterator, Optional

import numpy as np

from .core import Frame, MarkerGrid, UsageError
from .simulate import GroundTruth


class StreamFormatError(RuntimeError):
    """The NDJSON header is missing or unusable (fatal for the stream)."""


def fmt(value: float) -> str:
    """Fixed 6-significant-digit rendering used by every CSV column."""
    return format(float(value), ".6g")


def write_header(out: IO[str], grid: MarkerGrid) -> None:
    out.write(
        json.dumps(
            {
                "rows": grid.rows,
                "cols": grid.cols,
                "pitch": grid.pitch,
                "origin": [grid.origin[0], grid.origin[1]],
            }
        )
        + "\n"
    )


def write_frame(out: IO[str], frame: Frame) -> None:
    out.write(json.dumps({"t": frame.timestamp, "d": frame.displacements.tolist()}) + "\n")


def write_truth_header(out: IO[str], grid: MarkerGrid) -> None:
    write_header(out, grid)


def write_truth(out: IO[str], t: float, truth: GroundTruth) -> None:
    out.write(
        json.dumps(
            {
                "t": t,
                "theta": truth.theta,
                "stick": [int(v) for v in truth.stick_mask],
                "contact": [int(v) for v in truth.contact_mask_true],
                "slip": truth.slip_field.tolist(),
            }
        )
        + "\n"
    )


def read_header(lines: Iterator[str]) -> MarkerGrid:
    """Parse the stream header into a grid; malformed header is fatal."""
    for line in lines:
        if line.strip():
            break
    else:
        raise StreamFormatError("empty stream: no header line")
    try:
        obj = json.loads(line)
        return MarkerGrid(
            rows=int(obj["rows"]),
            cols=int(obj["cols"]),
            pitch=float(obj["pitch"]),
            origin=(float(obj["origin"][0]), float(obj["origin"][1])),
        )
    except (json.JSONDecodeError, KeyError, TypeError, ValueError, UsageError) as exc:
        raise StreamFormatError(f"bad stream header: {exc}") from exc


def read_frames(
    lines: Iterator[str],
    grid: MarkerGrid,
    warn: Optional[IO[str]] = None,
) -> Iterator[Frame]:
    """Yield frames from NDJSON lines, skipping malformed ones with a warning.

    A line is skipped (never fatal) when it fails to parse, has the wrong
    marker count, or contains non-finite components.
    """
    warn = warn if warn is not None else sys.stderr
    for lineno, line in enumerate(lines, start=2):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
            d = np.asarray(obj["d"], dtype=float)
            if d.shape != (grid.n_markers, 3):
                raise ValueError(f"expected {grid.n_markers}x3 displacements, got {d.shape}")
            if not np.all(np.isfinite(d)) or not math.isfinite(float(obj["t"])):
                raise ValueError("non-finite component")
            yield Frame(timestamp=float(obj["t"]), displacements=d)
        except (json.JSONDecodeError, KeyError, TypeError, ValueError, UsageError) as exc:
            print(f"warning: skipping frame line {lineno}: {exc}", file=warn)


def write_csv_row(out: IO[str], cells: Iterable[str]) -> None:
    out.write(",".join(cells) + "\n")
