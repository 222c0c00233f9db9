"""Contact detection, stick-centre selection and stick-region growth."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np

from .core import (
    ContactMask,
    ContactState,
    Frame,
    LineFeatureAngles,
    MarkerGrid,
    StickRegion,
    UsageError,
    neighbor_indices,
)
from .features import normalized_angle_difference

# Keeps the tangential-deviation score term finite for a motionless patch.
_SCORE_EPSILON_MM = 1e-6


@dataclass(frozen=True)
class SegmentationConfig:
    """Thresholds for contact detection and stick-region growth.

    ``contact_threshold`` (mm) gates the stick-centre deformation modulus,
    ``normal_filter_ratio`` flags contact markers relative to the largest
    normal displacement, ``delta_phi_th`` is the dimensionless admission
    threshold on the normalized angle difference, and regions smaller than
    ``min_stick_markers`` are classified as macro slip.
    """

    contact_threshold: float = 0.1
    normal_filter_ratio: float = 0.5
    delta_phi_th: float = 0.4
    min_stick_markers: int = 3
    epsilon_angle: float = 0.05

    def __post_init__(self) -> None:
        if not self.contact_threshold > 0:
            raise UsageError("contact_threshold must be positive")
        if not 0 < self.normal_filter_ratio < 1:
            raise UsageError("normal_filter_ratio must lie in (0, 1)")
        if not self.delta_phi_th > 0:
            raise UsageError("delta_phi_th must be positive")
        if self.min_stick_markers < 1:
            raise UsageError("min_stick_markers must be >= 1")
        if not self.epsilon_angle > 0:
            raise UsageError("epsilon_angle must be positive")


def detect_contact(grid: MarkerGrid, frame: Frame, cfg: SegmentationConfig) -> ContactMask:
    """Flag contact markers and pick the assumed stick centre.

    Markers whose normal displacement reaches ``normal_filter_ratio`` times
    the largest normal displacement are flagged. The stick centre is the
    flagged marker with the smallest combined score of (distance to the
    flagged centroid) / pitch plus the relative deviation of its tangential
    magnitude from the flagged mean; ties resolve to the lowest index.
    Contact counts as detected only when the centre's full deformation
    modulus exceeds ``contact_threshold``.
    """
    frame.require_grid(grid)
    disp = frame.displacements
    dz = disp[:, 2]
    flags = dz >= cfg.normal_filter_ratio * dz.max()
    flagged_idx = np.flatnonzero(flags)
    if flagged_idx.size == 0:
        return ContactMask(flags=np.zeros(grid.n_markers, dtype=bool), contact_detected=False)

    pos = grid.reference_positions[flagged_idx]
    centroid = pos.mean(axis=0)
    tang = np.hypot(disp[flagged_idx, 0], disp[flagged_idx, 1])
    score = (
        np.hypot(pos[:, 0] - centroid[0], pos[:, 1] - centroid[1]) / grid.pitch
        + np.abs(tang - tang.mean()) / (tang.mean() + _SCORE_EPSILON_MM)
    )
    center = int(flagged_idx[np.argmin(score)])

    modulus = float(np.linalg.norm(disp[center]))
    if modulus <= cfg.contact_threshold:
        return ContactMask(flags=np.zeros(grid.n_markers, dtype=bool), contact_detected=False)
    return ContactMask(flags=flags, contact_detected=True, center_index=center)


def grow_stick_region(
    grid: MarkerGrid,
    mask: ContactMask,
    angles: LineFeatureAngles,
    cfg: SegmentationConfig,
) -> StickRegion:
    """Grow the stick region outward from the centre over flagged markers.

    Breadth-first growth in deterministic order (frontier sorted by
    distance to the centre, then index); a frontier marker is admitted when
    its normalized angle difference against the running region mean stays
    below ``delta_phi_th``, and the mean is updated after every admission.
    Rejected markers are not re-tested. Flagged markers without a valid
    angle are not admissible and do not carry connectivity.
    """
    if not mask.contact_detected:
        return StickRegion(
            members=frozenset(), mean_angle=0.0, state=ContactState.NO_CONTACT, stick_ratio=0.0
        )
    center = mask.center_index
    n_flagged = mask.n_flagged
    if center is None or not angles.valid[center]:
        return StickRegion(
            members=frozenset(), mean_angle=0.0, state=ContactState.MACRO_SLIP, stick_ratio=0.0
        )

    pos = grid.reference_positions
    cpos = pos[center]
    phi = angles.angles
    admissible = mask.flags & angles.valid

    members: list[int] = [center]
    mean = float(phi[center])
    seen = {center}
    frontier: list[tuple[float, int]] = []

    def push_neighbors(index: int) -> None:
        for nbr in neighbor_indices(grid, index):
            if nbr is None or nbr in seen or not admissible[nbr]:
                continue
            seen.add(nbr)
            dist = float(np.hypot(pos[nbr, 0] - cpos[0], pos[nbr, 1] - cpos[1]))
            heapq.heappush(frontier, (dist, nbr))

    push_neighbors(center)
    while frontier:
        _, idx = heapq.heappop(frontier)
        diff = normalized_angle_difference(float(phi[idx]), mean, cfg.epsilon_angle)
        if diff < cfg.delta_phi_th:
            members.append(idx)
            mean += (float(phi[idx]) - mean) / len(members)
            push_neighbors(idx)

    member_set = frozenset(members)
    if len(member_set) < cfg.min_stick_markers:
        state = ContactState.MACRO_SLIP
    elif len(member_set) == n_flagged:
        state = ContactState.STICK
    else:
        state = ContactState.INCIPIENT_SLIP
    mean_angle = float(np.mean(phi[sorted(member_set)]))
    return StickRegion(
        members=member_set,
        mean_angle=mean_angle,
        state=state,
        stick_ratio=len(member_set) / n_flagged,
    )
