"""
Configuration management for multistat.
"""
from typing import Dict, Any, List, Optional
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
import json
import yaml


@dataclass
class SolverConfig:
    """Point-solver configuration."""
    pair_width: str = "1e-30"
    tolerance: str = "1e-12"
    refine_budget: int = 8

    @property
    def pair_width_value(self) -> Fraction:
        return Fraction(self.pair_width)

    @property
    def tolerance_value(self) -> Fraction:
        return Fraction(self.tolerance)


@dataclass
class ReductionConfig:
    """Elimination configuration."""
    pivot_order: str = "laws-last"


@dataclass
class SamplingConfig:
    """Grid sampling configuration."""
    threads: int = 1
    chunk_size: int = 8


@dataclass
class RegionConfig:
    """Open CAD region solver configuration."""
    base_axis: str = "k17"
    factor_projection: bool = True
    delineability_samples: int = 3
    window: Dict[str, List[float]] = field(
        default_factory=lambda: {"k17": [0.0, 200.0], "k19": [0.0, 1000.0]}
    )
    raster_columns: int = 6


@dataclass
class StabilityConfig:
    """Stability classification configuration."""
    eliminate: List[str] = field(default_factory=lambda: ["x1", "x7", "x11"])
    budget: int = 4


@dataclass
class CacheConfig:
    """Result cache configuration."""
    enabled: bool = True
    directory: Optional[str] = None
    default_ttl: int = 86400


@dataclass
class OutputConfig:
    """Output formatting configuration."""
    digits: int = 6


@dataclass
class MultistatConfig:
    """Main multistat configuration."""
    solver: SolverConfig
    sampling: SamplingConfig
    region: RegionConfig
    stability: StabilityConfig
    cache: CacheConfig
    output: OutputConfig
    reduction: ReductionConfig = field(default_factory=ReductionConfig)
    log_level: str = "INFO"
    seed: int = 0


def load_config(config_path: Optional[str] = None) -> MultistatConfig:
    """Load configuration from defaults and an optional JSON or YAML file."""

    # Default configuration
    config_data: Dict[str, Any] = {
        "solver": {"pair_width": "1e-30", "tolerance": "1e-12", "refine_budget": 8},
        "sampling": {"threads": 1, "chunk_size": 8},
        "region": {
            "base_axis": "k17",
            "factor_projection": True,
            "delineability_samples": 3,
            "window": {"k17": [0.0, 200.0], "k19": [0.0, 1000.0]},
            "raster_columns": 6,
        },
        "stability": {"eliminate": ["x1", "x7", "x11"], "budget": 4},
        "cache": {"enabled": True, "directory": None, "default_ttl": 86400},
        "output": {"digits": 6},
        "reduction": {"pivot_order": "laws-last"},
        "log_level": "INFO",
        "seed": 0,
    }

    # Load from config file if provided
    if config_path:
        config_file = Path(config_path)
        if not config_file.exists():
            raise FileNotFoundError(f"Config file not found: {config_file}")
        if config_file.suffix == '.json':
            with open(config_file) as f:
                file_config = json.load(f)
        elif config_file.suffix in ['.yml', '.yaml']:
            with open(config_file) as f:
                file_config = yaml.safe_load(f) or {}
        else:
            raise ValueError(f"Unsupported config file format: {config_file.suffix}")

        # Merge file config with defaults
        config_data = _merge_config(config_data, file_config)

    # Validate
    if config_data["sampling"]["threads"] < 1:
        raise ValueError("sampling.threads must be at least 1")
    if config_data["output"]["digits"] < 1:
        raise ValueError("output.digits must be at least 1")
    if Fraction(config_data["solver"]["pair_width"]) <= 0:
        raise ValueError("solver.pair_width must be positive")
    if config_data["reduction"]["pivot_order"] not in ("laws-last", "fewest-terms"):
        raise ValueError("reduction.pivot_order must be laws-last or fewest-terms")

    return MultistatConfig(
        solver=SolverConfig(**config_data["solver"]),
        sampling=SamplingConfig(**config_data["sampling"]),
        region=RegionConfig(**config_data["region"]),
        stability=StabilityConfig(**config_data["stability"]),
        cache=CacheConfig(**config_data["cache"]),
        output=OutputConfig(**config_data["output"]),
        reduction=ReductionConfig(**config_data["reduction"]),
        log_level=config_data["log_level"],
        seed=config_data["seed"],
    )


def _merge_config(base: Dict[str, Any], override: Dict[str, Any]) -> Dict[str, Any]:
    """Recursively merge configuration dictionaries."""
    result = base.copy()

    for key, value in override.items():
        if key in result and isinstance(result[key], dict) and isinstance(value, dict):
            result[key] = _merge_config(result[key], value)
        else:
            result[key] = value

    return result
