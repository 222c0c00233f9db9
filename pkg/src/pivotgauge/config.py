"""Loading of the shared JSON configuration document.

One file carries five sections: ``grid``, ``scenario``, ``segmentation``,
``softness`` and ``harness``. Every section and every key is optional
(defaults apply), but unknown sections or keys are fatal so typos cannot
silently change an experiment. Named presets shipped with the package can
be referenced by name instead of a path.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Optional, Union

from .core import ConfigError, MarkerGrid, SoftnessParams, UsageError
from .segmentation import SegmentationConfig
from .simulate import SimScenario

_GRID_KEYS = {"rows", "cols", "pitch", "origin"}
_SCENARIO_KEYS = {
    "contact_radius",
    "max_indent",
    "cor",
    "stick_radius",
    "theta_trajectory",
    "translation_trajectory",
    "decay_exponent",
    "noise_sigma",
    "rng_seed",
}
_SEGMENTATION_KEYS = {
    "contact_threshold",
    "normal_filter_ratio",
    "delta_phi_th",
    "min_stick_markers",
    "epsilon_angle",
}
_SOFTNESS_KEYS = {"k", "l_xy", "l_yx"}
_HARNESS_KEYS = {"trials", "rate_hz", "t_start", "t_end"}
_SECTIONS = {"grid", "scenario", "segmentation", "softness", "harness"}


@dataclass(frozen=True)
class HarnessConfig:
    """Experiment-harness parameters shared by the CLI subcommands."""

    trials: int = 25
    rate_hz: float = 30.0
    t_start: float = 0.0
    t_end: float = 1.0

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ConfigError("harness.trials must be >= 1")
        if not self.rate_hz > 0:
            raise ConfigError("harness.rate_hz must be positive")


@dataclass(frozen=True)
class FullConfig:
    grid: MarkerGrid
    scenario: SimScenario
    segmentation: SegmentationConfig
    softness: SoftnessParams
    harness: HarnessConfig


def _check_keys(section: str, data: dict, allowed: set[str]) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(
            f"unknown key(s) in section '{section}': {', '.join(sorted(unknown))}"
        )


def preset_path(name: str) -> Optional[Path]:
    """Path of a named preset shipped with the package, or None."""
    candidate = resources.files("pivotgauge").joinpath("presets", f"{name.replace('-', '_')}.json")
    try:
        if candidate.is_file():
            return Path(str(candidate))
    except (OSError, TypeError):
        return None
    return None


def build_config(document: dict[str, Any]) -> FullConfig:
    """Build the typed configuration from a parsed JSON document."""
    if not isinstance(document, dict):
        raise ConfigError("config document must be a JSON object")
    unknown = set(document) - _SECTIONS
    if unknown:
        raise ConfigError(f"unknown config section(s): {', '.join(sorted(unknown))}")

    grid_raw = dict(document.get("grid", {}))
    _check_keys("grid", grid_raw, _GRID_KEYS)
    if "origin" in grid_raw:
        grid_raw["origin"] = tuple(grid_raw["origin"])
    scenario_raw = dict(document.get("scenario", {}))
    _check_keys("scenario", scenario_raw, _SCENARIO_KEYS)
    seg_raw = dict(document.get("segmentation", {}))
    _check_keys("segmentation", seg_raw, _SEGMENTATION_KEYS)
    soft_raw = dict(document.get("softness", {}))
    _check_keys("softness", soft_raw, _SOFTNESS_KEYS)
    harness_raw = dict(document.get("harness", {}))
    _check_keys("harness", harness_raw, _HARNESS_KEYS)

    try:
        grid = MarkerGrid(**grid_raw)
        softness = SoftnessParams(**soft_raw)
        if "cor" in scenario_raw:
            scenario_raw["cor"] = tuple(scenario_raw["cor"])
        scenario = SimScenario(grid=grid, softness=softness, **scenario_raw)
        segmentation = SegmentationConfig(**seg_raw)
        harness = HarnessConfig(**harness_raw)
    except (UsageError, TypeError) as exc:
        raise ConfigError(f"invalid config value: {exc}") from exc
    return FullConfig(
        grid=grid, scenario=scenario, segmentation=segmentation,
        softness=softness, harness=harness,
    )


def load_config(source: Union[str, Path, None] = None) -> FullConfig:
    """Load a configuration from a path, a preset name, or defaults.

    ``source`` may be None (all defaults), the path of a JSON file, or the
    name of a shipped preset such as ``three-lift``.
    """
    if source is None:
        return build_config({})
    path = Path(source)
    if not path.is_file():
        preset = preset_path(str(source))
        if preset is None:
            raise ConfigError(f"config file or preset not found: {source}")
        path = preset
    try:
        text = path.read_text()
        document = json.loads(text)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse failure in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    return build_config(document)


def apply_overrides(document: dict[str, Any], overrides: list[str]) -> dict[str, Any]:
    """Apply ``section.key=value`` override strings to a raw document.

    Values are parsed as JSON when possible, else kept as strings.
    """
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"override must look like section.key=value, got '{item}'")
        target, value_text = item.split("=", 1)
        if "." not in target:
            raise ConfigError(f"override key must be section.key, got '{target}'")
        section, key = target.split(".", 1)
        try:
            value = json.loads(value_text)
        except json.JSONDecodeError:
            value = value_text
        document.setdefault(section, {})
        if not isinstance(document[section], dict):
            raise ConfigError(f"config section '{section}' is not an object")
        document[section][key] = value
    return document


def load_document(source: Union[str, Path, None]) -> dict[str, Any]:
    """Load the raw JSON document (for override support), defaults to {}."""
    if source is None:
        return {}
    path = Path(source)
    if not path.is_file():
        preset = preset_path(str(source))
        if preset is None:
            raise ConfigError(f"config file or preset not found: {source}")
        path = preset
    try:
        return json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(
            f"config parse failure in {path} at line {exc.lineno}, column {exc.colno}: {exc.msg}"
        ) from exc
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
