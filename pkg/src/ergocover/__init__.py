"""Multi-robot ergodic coverage with an online-learned target density."""
from .config import ScenarioConfig, default_config, parse_config, parse_config_text, resolve, to_ini
from .domain import MOVING, STATIC, Domain, GroundTruthField, Grid, eval_truth, scurve_progress
from .errors import (
    ConfigError,
    DataError,
    DivergenceError,
    DomainViolationError,
    ErgoCoverError,
    NormalizationError,
    ShapeError,
)
from .harness import Comparison, RunRecord, baseline_of, compare, normalized_rmse, run
from .outputs import write_comparison, write_outputs

__version__ = "0.1.0"

__all__ = [
    "Comparison",
    "ConfigError",
    "DataError",
    "DivergenceError",
    "Domain",
    "DomainViolationError",
    "ErgoCoverError",
    "GroundTruthField",
    "Grid",
    "MOVING",
    "NormalizationError",
    "RunRecord",
    "STATIC",
    "ScenarioConfig",
    "ShapeError",
    "baseline_of",
    "compare",
    "default_config",
    "eval_truth",
    "normalized_rmse",
    "parse_config",
    "parse_config_text",
    "resolve",
    "run",
    "scurve_progress",
    "to_ini",
    "write_comparison",
    "write_outputs",
]
