"""Shared test fixtures and independent brute-force oracles.

The oracles here deliberately re-derive quantities with plain Python loops
(no shared code with the package's vectorized paths) so they can vouch for
the implementation.
"""

from __future__ import annotations

import math

import numpy as np
import pytest

from pivotgauge import Frame, MarkerGrid


def brute_force_feature_angle(grid: MarkerGrid, frame: Frame, index: int) -> float | None:
    """Mean segment angle at one marker via plain loops; None when invalid."""
    rows, cols, pitch = grid.rows, grid.cols, grid.pitch
    i, j = divmod(index, cols)
    disp = frame.displacements
    pos = grid.reference_positions
    neighbors = []
    if j > 0:
        neighbors.append(index - 1)
    if j < cols - 1:
        neighbors.append(index + 1)
    if i > 0:
        neighbors.append(index - cols)
    if i < rows - 1:
        neighbors.append(index + cols)
    angles = []
    for nbr in neighbors:
        ox = pos[nbr, 0] - pos[index, 0]
        oy = pos[nbr, 1] - pos[index, 1]
        cx = ox + disp[nbr, 0] - disp[index, 0]
        cy = oy + disp[nbr, 1] - disp[index, 1]
        if math.hypot(cx, cy) < 0.01 * pitch:
            continue
        cross = ox * cy - oy * cx
        dot = ox * cx + oy * cy
        angles.append(math.degrees(math.atan2(cross, dot)))
    if len(angles) < 2:
        return None
    return sum(angles) / len(angles)


def brute_force_flags(frame: Frame, ratio: float) -> np.ndarray:
    dz = [row[2] for row in frame.displacements]
    top = max(dz)
    return np.array([v >= ratio * top for v in dz], dtype=bool)


def f1_against_mask(members, truth_mask: np.ndarray) -> float:
    recovered = np.zeros(truth_mask.shape[0], dtype=bool)
    recovered[list(members)] = True
    tp = int((recovered & truth_mask).sum())
    fp = int((recovered & ~truth_mask).sum())
    fn = int((~recovered & truth_mask).sum())
    denom = 2 * tp + fp + fn
    return 2 * tp / denom if denom else 1.0


@pytest.fixture
def grid20() -> MarkerGrid:
    return MarkerGrid()
