"""Statevector simulation, Pauli noise and shot sampling."""

from .engine import (
    SHOT_BLOCK,
    FrameTable,
    IdealDistribution,
    ShotRecord,
    compile_frame,
    exact_outcome_distribution,
    ideal_distribution,
    run_ideal,
    run_noisy,
    sample_ideal,
    sample_noisy,
    sample_trajectories,
    to_records,
)
from .noise import DeviceParams, NoiseModel, get_device, load_devices, noise_model_from_device
from .statevector import (
    DEFAULT_MAX_QUBITS,
    Statevector,
    apply_gate,
    init_state,
    sample_measurement,
    simulate,
)

__all__ = [
    "DEFAULT_MAX_QUBITS",
    "SHOT_BLOCK",
    "DeviceParams",
    "FrameTable",
    "IdealDistribution",
    "NoiseModel",
    "ShotRecord",
    "Statevector",
    "apply_gate",
    "compile_frame",
    "exact_outcome_distribution",
    "get_device",
    "ideal_distribution",
    "init_state",
    "load_devices",
    "noise_model_from_device",
    "run_ideal",
    "run_noisy",
    "sample_ideal",
    "sample_measurement",
    "sample_noisy",
    "sample_trajectories",
    "simulate",
    "to_records",
]
