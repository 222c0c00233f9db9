"""Experiment harness: static sweep, dynamic trajectory, stream replay,
estimator comparison.

The static protocol applies discrete rotations one frame at a time and
bypasses the temporal filter; the dynamic protocol streams a trajectory
through the full filtered pipeline. Every emitted CSV has a fixed column
order and is byte-deterministic under a fixed seed.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import IO, Optional

import numpy as np

from .config import FullConfig
from .core import ContactState, InsufficientDataError
from .estimation import RotationPipeline, baseline_least_squares, estimate_frame
from .simulate import generate_frame, generate_trajectory, with_constant_theta
from .streams import fmt, read_frames, read_header, write_csv_row

SWEEP_ANGLES = tuple(range(2, 21))
VALID_RANGE = (2.0, 20.0)

SWEEP_CSV_HEADER = (
    "theta_true_deg",
    "trials",
    "proposed_mae_deg",
    "proposed_std_deg",
    "baseline_mae_deg",
    "baseline_std_deg",
    "baseline_failures",
)
DYNAMIC_CSV_HEADER = (
    "t",
    "theta_true_deg",
    "theta_raw_deg",
    "theta_filtered_deg",
    "state",
    "stick_ratio",
)
ESTIMATE_CSV_HEADER = (
    "t",
    "theta_raw_deg",
    "theta_filtered_deg",
    "state",
    "stick_ratio",
)
COMPARE_CSV_HEADER = (
    "theta_true_deg",
    "trials",
    "proposed_mae_deg",
    "baseline_mae_deg",
    "win_rate",
    "baseline_failures",
)


@dataclass(frozen=True)
class SweepRow:
    theta_true: float
    trials: int
    mean_abs_error: float
    std_error: float
    failures: int = 0


@dataclass(frozen=True)
class SweepReport:
    """Per-angle error rows plus the overall mean absolute rotational error."""

    estimator: str
    rows: tuple[SweepRow, ...]
    mare: float
    mare_std: float


@dataclass(frozen=True)
class CompareRow:
    theta_true: float
    trials: int
    proposed_mae: float
    baseline_mae: float
    win_rate: float
    baseline_failures: int


@dataclass(frozen=True)
class CompareReport:
    rows: tuple[CompareRow, ...]
    overall_win_rate: float


def _sweep_trials(config: FullConfig, trials: int):
    """Yield (theta, trial, frame, mask, proposed_err, baseline_err|nan)."""
    for angle_pos, theta in enumerate(SWEEP_ANGLES):
        scenario = with_constant_theta(config.scenario, float(theta))
        for trial in range(trials):
            frame_index = angle_pos * trials + trial
            frame, _truth = generate_frame(scenario, 0.0, frame_index=frame_index)
            proposed, mask, _region = estimate_frame(
                config.grid, frame, config.segmentation, config.softness
            )
            p_err = abs(proposed.theta - theta)
            try:
                base = baseline_least_squares(config.grid, frame, mask)
                b_err = abs(base.theta - theta)
            except InsufficientDataError:
                b_err = math.nan
            yield theta, trial, p_err, b_err


def run_static_sweep(
    config: FullConfig,
    trials: Optional[int] = None,
    csv_out: Optional[IO[str]] = None,
) -> dict[str, SweepReport]:
    """Static rotation sweep over integer angles 2..20 degrees.

    Each trial is a single independently seeded frame at a fixed angle run
    through the unfiltered pipeline; errors are aggregated per angle and
    overall for both the stick-region estimator and the least-squares
    baseline.
    """
    trials = trials if trials is not None else config.harness.trials
    per_angle: dict[float, dict[str, list[float]]] = {
        float(a): {"proposed": [], "baseline": []} for a in SWEEP_ANGLES
    }
    for theta, _trial, p_err, b_err in _sweep_trials(config, trials):
        per_angle[float(theta)]["proposed"].append(p_err)
        per_angle[float(theta)]["baseline"].append(b_err)

    if csv_out is not None:
        write_csv_row(csv_out, SWEEP_CSV_HEADER)

    rows = {"proposed": [], "baseline": []}
    all_errors = {"proposed": [], "baseline": []}
    for theta in (float(a) for a in SWEEP_ANGLES):
        p = np.asarray(per_angle[theta]["proposed"])
        b_raw = np.asarray(per_angle[theta]["baseline"])
        b = b_raw[~np.isnan(b_raw)]
        n_fail = int(np.isnan(b_raw).sum())
        rows["proposed"].append(
            SweepRow(theta, len(p), float(p.mean()), float(p.std()), 0)
        )
        b_mae = float(b.mean()) if b.size else math.nan
        b_std = float(b.std()) if b.size else math.nan
        rows["baseline"].append(SweepRow(theta, len(b_raw), b_mae, b_std, n_fail))
        all_errors["proposed"].extend(p)
        all_errors["baseline"].extend(b)
        if csv_out is not None:
            write_csv_row(
                csv_out,
                (
                    fmt(theta),
                    str(len(p)),
                    fmt(p.mean()),
                    fmt(p.std()),
                    fmt(b_mae),
                    fmt(b_std),
                    str(n_fail),
                ),
            )

    reports = {}
    for name in ("proposed", "baseline"):
        errs = np.asarray(all_errors[name])
        reports[name] = SweepReport(
            estimator=name,
            rows=tuple(rows[name]),
            mare=float(errs.mean()) if errs.size else math.nan,
            mare_std=float(errs.std()) if errs.size else math.nan,
        )
    return reports


@dataclass(frozen=True)
class DynamicResult:
    n_frames: int
    in_range_frames: int
    mare: float


def _in_valid_range(theta_true: float, state: ContactState) -> bool:
    return (
        VALID_RANGE[0] <= abs(theta_true) <= VALID_RANGE[1]
        and state is not ContactState.MACRO_SLIP
    )


def run_dynamic(config: FullConfig, csv_out: Optional[IO[str]] = None) -> DynamicResult:
    """Stream the configured trajectory through the filtered pipeline.

    The summary error covers only in-range frames: |true angle| within
    [2, 20] degrees and no macro slip.
    """
    harness = config.harness
    pipeline = RotationPipeline(config.grid, config.segmentation, config.softness)
    if csv_out is not None:
        write_csv_row(csv_out, DYNAMIC_CSV_HEADER)
    errors = []
    n = 0
    for frame, truth in generate_trajectory(
        config.scenario, harness.t_start, harness.t_end, harness.rate_hz
    ):
        filtered = pipeline.process_frame(frame)
        raw = pipeline.last_raw
        n += 1
        if _in_valid_range(truth.theta, filtered.state):
            errors.append(abs(filtered.theta - truth.theta))
        if csv_out is not None:
            write_csv_row(
                csv_out,
                (
                    fmt(frame.timestamp),
                    fmt(truth.theta),
                    fmt(raw.theta),
                    fmt(filtered.theta),
                    str(filtered.state),
                    fmt(filtered.stick_ratio),
                ),
            )
    mare = float(np.mean(errors)) if errors else math.nan
    return DynamicResult(n_frames=n, in_range_frames=len(errors), mare=mare)


def estimate_from_stream(
    lines,
    config: FullConfig,
    csv_out: IO[str],
    warn: Optional[IO[str]] = None,
) -> int:
    """Replay an NDJSON frame stream through the pipeline, CSV to ``csv_out``.

    The stream header defines the grid. Malformed frame lines are skipped
    with a warning; a malformed header is fatal. Returns the number of
    frames processed.
    """
    grid = read_header(lines)
    pipeline = RotationPipeline(grid, config.segmentation, config.softness)
    write_csv_row(csv_out, ESTIMATE_CSV_HEADER)
    n = 0
    for frame in read_frames(lines, grid, warn=warn):
        filtered = pipeline.process_frame(frame)
        raw = pipeline.last_raw
        n += 1
        write_csv_row(
            csv_out,
            (
                fmt(frame.timestamp),
                fmt(raw.theta),
                fmt(filtered.theta),
                str(filtered.state),
                fmt(filtered.stick_ratio),
            ),
        )
    return n


def compare_estimators(
    config: FullConfig,
    trials: Optional[int] = None,
    csv_out: Optional[IO[str]] = None,
) -> CompareReport:
    """Side-by-side per-angle errors plus the proposed-vs-baseline win rate.

    A trial is a win when the stick-region estimator's absolute error is
    strictly smaller than the baseline's. Trials where the baseline has too
    few markers count as failures and are excluded from the win rate.
    """
    trials = trials if trials is not None else config.harness.trials
    per_angle: dict[float, dict[str, list[float]]] = {
        float(a): {"proposed": [], "baseline": []} for a in SWEEP_ANGLES
    }
    for theta, _trial, p_err, b_err in _sweep_trials(config, trials):
        per_angle[float(theta)]["proposed"].append(p_err)
        per_angle[float(theta)]["baseline"].append(b_err)

    if csv_out is not None:
        write_csv_row(csv_out, COMPARE_CSV_HEADER)
    rows = []
    total_wins = 0
    total_valid = 0
    for theta in (float(a) for a in SWEEP_ANGLES):
        p = np.asarray(per_angle[theta]["proposed"])
        b = np.asarray(per_angle[theta]["baseline"])
        ok = ~np.isnan(b)
        wins = int(np.sum(p[ok] < b[ok]))
        n_ok = int(ok.sum())
        total_wins += wins
        total_valid += n_ok
        win_rate = wins / n_ok if n_ok else math.nan
        row = CompareRow(
            theta_true=theta,
            trials=len(p),
            proposed_mae=float(p.mean()),
            baseline_mae=float(b[ok].mean()) if n_ok else math.nan,
            win_rate=win_rate,
            baseline_failures=len(p) - n_ok,
        )
        rows.append(row)
        if csv_out is not None:
            write_csv_row(
                csv_out,
                (
                    fmt(theta),
                    str(row.trials),
                    fmt(row.proposed_mae),
                    fmt(row.baseline_mae),
                    fmt(row.win_rate),
                    str(row.baseline_failures),
                ),
            )
    overall = total_wins / total_valid if total_valid else math.nan
    return CompareReport(rows=tuple(rows), overall_win_rate=overall)


def measure_frame_latency(config: FullConfig, n_frames: int = 1000) -> dict[str, float]:
    """Wall-clock per-frame pipeline latency over a synthetic stream, seconds."""
    scenario = with_constant_theta(config.scenario, 10.0)
    frames = [
        generate_frame(scenario, i / config.harness.rate_hz, frame_index=i)[0]
        for i in range(n_frames)
    ]
    pipeline = RotationPipeline(config.grid, config.segmentation, config.softness)
    samples = []
    for frame in frames:
        start = time.perf_counter()
        pipeline.process_frame(frame)
        samples.append(time.perf_counter() - start)
    arr = np.sort(np.asarray(samples))
    return {
        "mean": float(arr.mean()),
        "p99": float(arr[min(len(arr) - 1, int(math.ceil(0.99 * len(arr))) - 1)]),
        "max": float(arr[-1]),
    }
