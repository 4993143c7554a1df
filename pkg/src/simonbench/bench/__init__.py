"""Experiment harness and CLI."""

from .harness import (
    ErrorRateRecord,
    ErrorRateTable,
    ExperimentConfig,
    FitResult,
    RecoveryFailed,
    RecoveryReport,
    algorithmic_error_rate,
    cnot_distance_experiment,
    linear_fit_extrapolate,
    parse_report,
    read_report,
    recover_secret_end_to_end,
    report,
    run_experiment,
)

__all__ = [
    "ErrorRateRecord",
    "ErrorRateTable",
    "ExperimentConfig",
    "FitResult",
    "RecoveryFailed",
    "RecoveryReport",
    "algorithmic_error_rate",
    "cnot_distance_experiment",
    "linear_fit_extrapolate",
    "parse_report",
    "read_report",
    "recover_secret_end_to_end",
    "report",
    "run_experiment",
]
