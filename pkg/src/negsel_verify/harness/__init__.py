from .config import ConfigError, ExperimentConfig, PropertySpec
from .experiment import (
    ExperimentError,
    ExperimentReport,
    RunRecord,
    run_experiment,
    strip_timing,
    sweep,
    write_outputs,
)
from .ground_truth import (
    GroundTruth,
    Label,
    ValidationResult,
    aggregate_label,
    label_cells,
    label_ground_truth,
    validate_detectors,
)
from .region_map import render_region_map

__all__ = [
    "ConfigError",
    "ExperimentConfig",
    "ExperimentError",
    "ExperimentReport",
    "GroundTruth",
    "Label",
    "PropertySpec",
    "RunRecord",
    "ValidationResult",
    "aggregate_label",
    "label_cells",
    "label_ground_truth",
    "render_region_map",
    "run_experiment",
    "strip_timing",
    "sweep",
    "validate_detectors",
    "write_outputs",
]
