"""Noisy simulation and routing benchmark for Simon's algorithm."""

from .circuit import (
    Circuit,
    GateOp,
    OracleKind,
    build_complex_oracle,
    build_simon_circuit,
    build_simple_oracle,
    classical_oracle_eval,
    emit_qasm,
    new_circuit,
    parse_qasm,
)
from .errors import SimonBenchError

__version__ = "0.1.0"
