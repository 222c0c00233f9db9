"""Line-feature angles and curl estimates of marker displacement fields.

The per-marker line-feature angle is the mean signed rotation of the
segments joining a marker to its 4-neighbours, comparing the deformed
segment direction against the reference direction. It responds to local
rotation of the field while being exactly invariant to uniform
translation, which is what makes it usable for pivot measurement.
"""

from __future__ import annotations

import math

import numpy as np

from .core import Frame, LineFeatureAngles, MarkerGrid

# Segment shorter than this fraction of the pitch is considered collapsed.
DEGENERATE_LENGTH_RATIO = 0.01


def _neighbor_index_arrays(grid: MarkerGrid) -> list[tuple[np.ndarray, np.ndarray]]:
    """(neighbour index or -1, reference offset) for left/right/up/down."""
    idx = np.arange(grid.n_markers)
    i, j = np.divmod(idx, grid.cols)
    p = grid.pitch
    out = []
    left = np.where(j > 0, idx - 1, -1)
    out.append((left, np.array([-p, 0.0])))
    right = np.where(j < grid.cols - 1, idx + 1, -1)
    out.append((right, np.array([p, 0.0])))
    up = np.where(i > 0, idx - grid.cols, -1)
    out.append((up, np.array([0.0, -p])))
    down = np.where(i < grid.rows - 1, idx + grid.cols, -1)
    out.append((down, np.array([0.0, p])))
    return out


def line_feature_angles(grid: MarkerGrid, frame: Frame) -> LineFeatureAngles:
    """Per-marker mean segment rotation angle, degrees, CCW positive.

    A marker is valid when at least two of its neighbour segments exist and
    are non-degenerate (current length >= 0.01 * pitch). Border markers
    with only 2-3 neighbours stay valid so contact patches near the edge
    still contribute.
    """
    frame.require_grid(grid)
    disp = frame.displacements[:, :2]
    n = grid.n_markers
    angle_sum = np.zeros(n)
    seg_count = np.zeros(n, dtype=int)
    min_len = DEGENERATE_LENGTH_RATIO * grid.pitch

    for nbr, offset in _neighbor_index_arrays(grid):
        present = nbr >= 0
        safe = np.where(present, nbr, 0)
        current = offset + disp[safe] - disp
        length = np.hypot(current[:, 0], current[:, 1])
        usable = present & (length >= min_len)
        cross = offset[0] * current[:, 1] - offset[1] * current[:, 0]
        dot = offset[0] * current[:, 0] + offset[1] * current[:, 1]
        seg_angle = np.degrees(np.arctan2(cross, dot))
        angle_sum[usable] += seg_angle[usable]
        seg_count[usable] += 1

    valid = seg_count >= 2
    angles = np.zeros(n)
    angles[valid] = angle_sum[valid] / seg_count[valid]
    return LineFeatureAngles(angles=angles, valid=valid)


def half_curl(grid: MarkerGrid, frame_prev: Frame, frame_next: Frame) -> np.ndarray:
    """Half the discrete curl of the displacement increment, degrees per marker.

    Central finite differences in the interior, one-sided at the borders.
    For a small rigid rotation increment this equals the sine-corrected
    increment angle everywhere.
    """
    frame_prev.require_grid(grid)
    frame_next.require_grid(grid)
    inc = frame_next.displacements - frame_prev.displacements
    dx = inc[:, 0].reshape(grid.rows, grid.cols)
    dy = inc[:, 1].reshape(grid.rows, grid.cols)
    # x varies along columns (axis=1), y along rows (axis=0)
    ddy_dx = np.gradient(dy, grid.pitch, axis=1)
    ddx_dy = np.gradient(dx, grid.pitch, axis=0)
    return np.degrees(0.5 * (ddy_dx - ddx_dy)).ravel()


def normalized_angle_difference(phi_i: float, phi_bar: float, epsilon: float = 0.05) -> float:
    """Dimensionless dissimilarity between a marker angle and a region mean.

    Same-sign angles well above the noise floor compare as
    |phi_i - phi_bar| / sqrt(phi_i * phi_bar); opposite rotations can never
    co-stick and return +inf; near-zero angles fall back to the linear
    floor |phi_i - phi_bar| / epsilon. Total function, never raises.
    """
    product = phi_i * phi_bar
    if product > epsilon * epsilon:
        return abs(phi_i - phi_bar) / math.sqrt(product)
    if abs(phi_i) > epsilon and abs(phi_bar) > epsilon:
        return math.inf
    return abs(phi_i - phi_bar) / epsilon
