from __future__ import annotations

import io
import json

import numpy as np
import pytest

from pivotgauge import ConfigError, MarkerGrid, generate_frame, load_config
from pivotgauge.config import apply_overrides, build_config
from pivotgauge.simulate import SimScenario
from pivotgauge.streams import (
    StreamFormatError,
    fmt,
    read_frames,
    read_header,
    write_frame,
    write_header,
)


def test_default_config_builds():
    config = load_config(None)
    assert config.grid.rows == 20
    assert config.segmentation.delta_phi_th == 0.4
    assert config.harness.trials == 25
    assert config.softness.k == 0.0


def test_three_lift_preset_loads_by_name():
    config = load_config("three-lift")
    assert config.scenario.theta_at(2.5) == pytest.approx(6.0)
    assert config.harness.t_end == 12.0
    assert config.scenario.rng_seed == 7


def test_unknown_section_is_fatal():
    with pytest.raises(ConfigError, match="unknown config section"):
        build_config({"scenario": {}, "extras": {}})


def test_unknown_key_is_fatal():
    with pytest.raises(ConfigError, match="contact_radiuss"):
        build_config({"scenario": {"contact_radiuss": 5.0}})
    with pytest.raises(ConfigError, match="segmentation"):
        build_config({"segmentation": {"delta_phi": 0.4}})


def test_parse_error_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n  "grid": {\n    "rows": 20,\n  }\n}\n')
    with pytest.raises(ConfigError, match="line"):
        load_config(path)


def test_missing_config_path_is_config_error(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        load_config(tmp_path / "nope.json")


def test_invalid_value_is_config_error():
    with pytest.raises(ConfigError, match="invalid config value"):
        build_config({"grid": {"rows": 1}})


def test_piecewise_trajectories_from_document():
    config = build_config(
        {
            "scenario": {
                "theta_trajectory": [[0.0, 0.0], [1.0, 10.0]],
                "stick_radius": [[0.0, 6.0], [1.0, 2.0]],
                "translation_trajectory": [[0.0, 0.0, 0.0], [1.0, 0.5, -0.5]],
            }
        }
    )
    assert config.scenario.theta_at(0.5) == pytest.approx(5.0)
    assert config.scenario.stick_radius_at(1.0) == pytest.approx(2.0)
    assert config.scenario.translation_at(1.0) == pytest.approx([0.5, -0.5])


def test_overrides_reach_nested_keys():
    doc = apply_overrides({}, ["scenario.noise_sigma=0.02", "harness.trials=7"])
    config = build_config(doc)
    assert config.scenario.noise_sigma == 0.02
    assert config.harness.trials == 7


def test_override_requires_section_key_form():
    with pytest.raises(ConfigError):
        apply_overrides({}, ["trials=7"])
    with pytest.raises(ConfigError):
        apply_overrides({}, ["harness.trials"])


def test_fmt_six_significant_digits():
    assert fmt(12.3456789) == "12.3457"
    assert fmt(0.000123456789) == "0.000123457"
    assert fmt(float("nan")) == "nan"


def test_ndjson_round_trip_is_exact():
    scn = SimScenario(theta_trajectory=9.0, noise_sigma=0.01, rng_seed=3)
    frames = [generate_frame(scn, t / 30.0, frame_index=i)[0] for i, t in enumerate(range(5))]
    buf = io.StringIO()
    write_header(buf, scn.grid)
    for frame in frames:
        write_frame(buf, frame)
    buf.seek(0)
    lines = iter(buf)
    grid = read_header(lines)
    assert grid == scn.grid
    restored = list(read_frames(lines, grid))
    assert len(restored) == len(frames)
    for original, parsed in zip(frames, restored):
        assert parsed.timestamp == original.timestamp
        assert np.array_equal(parsed.displacements, original.displacements)


def test_read_frames_skips_malformed_lines():
    grid = MarkerGrid(rows=2, cols=2)
    good = json.dumps({"t": 0.0, "d": [[0, 0, 0]] * 4})
    wrong_count = json.dumps({"t": 1.0, "d": [[0, 0, 0]] * 3})
    nan_line = '{"t": 2.0, "d": [[0, 0, NaN], [0,0,0], [0,0,0], [0,0,0]]}'
    later = json.dumps({"t": 3.0, "d": [[0, 0, 0]] * 4})
    warn = io.StringIO()
    frames = list(
        read_frames(iter([good, "not json", wrong_count, nan_line, later]), grid, warn=warn)
    )
    assert [f.timestamp for f in frames] == [0.0, 3.0]
    warnings = warn.getvalue().strip().splitlines()
    assert len(warnings) == 3
    assert all("skipping frame line" in w for w in warnings)


def test_bad_header_is_fatal():
    with pytest.raises(StreamFormatError):
        read_header(iter(["{not json"]))
    with pytest.raises(StreamFormatError):
        read_header(iter([]))
    with pytest.raises(StreamFormatError):
        read_header(iter([json.dumps({"rows": 20})]))


def test_header_defines_grid():
    grid = MarkerGrid(rows=4, cols=6, pitch=0.5, origin=(-1.0, 2.0))
    buf = io.StringIO()
    write_header(buf, grid)
    buf.seek(0)
    assert read_header(iter(buf)) == grid
