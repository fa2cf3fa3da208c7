"""Pipeline configuration: dataclass defaults plus TOML file overrides.

The config file is a flat TOML document; every key mirrors a field below
and any value may be overridden again by CLI flags.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .metrics import DEFAULT_BETA_SQUARED, default_threshold_grid
from .slic import SlicParams

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

FEATURE_BACKENDS = ("builtin", "file")


@dataclass(frozen=True)
class PipelineConfig:
    working_resolution: tuple[int, int] = (224, 224)
    slic: SlicParams = field(default_factory=SlicParams)
    feature_backend: str = "builtin"
    builtin_window: int = 9
    upscale_factor: int = 16
    alpha: float = 0.6
    beta_squared: float = DEFAULT_BETA_SQUARED
    threshold_grid: tuple[float, ...] = field(
        default_factory=lambda: tuple(default_threshold_grid())
    )

    def __post_init__(self) -> None:
        h, w = self.working_resolution
        if h < 1 or w < 1:
            raise ValueError("working_resolution must be positive")
        if self.feature_backend not in FEATURE_BACKENDS:
            raise ValueError(
                f"feature_backend must be one of {FEATURE_BACKENDS}, got {self.feature_backend!r}"
            )
        if self.upscale_factor < 1:
            raise ValueError("upscale_factor must be >= 1")
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError("alpha must lie in [0, 1]")
        if self.beta_squared <= 0:
            raise ValueError("beta_squared must be positive")
        grid = np.asarray(self.threshold_grid)
        if grid.size == 0 or grid.min() < 0 or grid.max() > 1:
            raise ValueError("threshold_grid must be a nonempty subset of [0, 1]")


def load_config(path: str | Path) -> PipelineConfig:
    """Build a config from a TOML file; missing keys keep their defaults."""
    with open(path, "rb") as fh:
        doc = tomllib.load(fh)
    return config_from_mapping(doc)


def config_from_mapping(doc: dict) -> PipelineConfig:
    doc = dict(doc)
    slic_keys = {f: doc.pop(f) for f in list(doc) if f in
                 ("region_count_target", "compactness", "iterations", "min_region_fraction")}
    slic_doc = doc.pop("slic", {})
    slic_doc.update(slic_keys)
    cfg = PipelineConfig(slic=SlicParams(**slic_doc))
    known = {f for f in cfg.__dataclass_fields__ if f != "slic"}
    overrides = {}
    for key, value in doc.items():
        if key not in known:
            raise ValueError(f"unknown config key {key!r}")
        if key == "working_resolution":
            value = tuple(value)
        if key == "threshold_grid":
            value = tuple(float(v) for v in value)
        overrides[key] = value
    return replace(cfg, **overrides)
