"""Dense statevector kernel.

The amplitude array is viewed as ``(2**q, 2, 2**(k-q-1))`` so the middle axis
is qubit line ``q`` (line 0 is the most significant index bit).  Every gate
updates that view in place and touches each amplitude pair once.
"""

from __future__ import annotations

import math

import numpy as np

from ..circuit import Circuit, GateOp
from ..errors import SimulationError

DEFAULT_MAX_QUBITS = 26
_INV_SQRT2 = 1.0 / math.sqrt(2.0)


class Statevector:
    __slots__ = ("amplitudes", "num_qubits")

    def __init__(self, amplitudes: np.ndarray, num_qubits: int):
        self.amplitudes = amplitudes
        self.num_qubits = num_qubits

    def copy(self) -> "Statevector":
        return Statevector(self.amplitudes.copy(), self.num_qubits)

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def probabilities(self) -> np.ndarray:
        return self.amplitudes.real**2 + self.amplitudes.imag**2

    def _view(self, q: int) -> np.ndarray:
        return self.amplitudes.reshape(1 << q, 2, -1)

    def _view2(self, a: int, b: int) -> tuple[np.ndarray, int, int]:
        # axes for lines a and b inside a 5-d view; a, b distinct
        lo, hi = sorted((a, b))
        k = self.num_qubits
        v = self.amplitudes.reshape(1 << lo, 2, 1 << (hi - lo - 1), 2, 1 << (k - hi - 1))
        return (v, 1, 3) if a < b else (v, 3, 1)


def init_state(k: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> Statevector:
    if k < 1:
        raise SimulationError(f"need at least one qubit, got {k}")
    if k > max_qubits:
        raise SimulationError(
            f"{k} qubits exceeds the cap of {max_qubits} "
            f"({(16 << k) / 2**30:.1f} GiB of amplitudes)"
        )
    amps = np.zeros(1 << k, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(amps, k)


def _take(v: np.ndarray, axis: int, value: int, other: int | None = None, other_value: int = 0) -> np.ndarray:
    idx: list = [slice(None)] * v.ndim
    idx[axis] = value
    if other is not None:
        idx[other] = other_value
    return v[tuple(idx)]


def apply_h(state: Statevector, q: int) -> None:
    v = state._view(q)
    a, b = v[:, 0, :], v[:, 1, :]
    s = a + b
    np.subtract(a, b, out=b)
    a[...] = s
    v *= _INV_SQRT2


def apply_x(state: Statevector, q: int) -> None:
    v = state._view(q)
    tmp = v[:, 0, :].copy()
    v[:, 0, :] = v[:, 1, :]
    v[:, 1, :] = tmp


def apply_y(state: Statevector, q: int) -> None:
    # Y|0> = i|1>, Y|1> = -i|0>
    v = state._view(q)
    tmp = v[:, 0, :].copy()
    v[:, 0, :] = -1j * v[:, 1, :]
    v[:, 1, :] = 1j * tmp


def apply_z(state: Statevector, q: int) -> None:
    state._view(q)[:, 1, :] *= -1


def apply_cnot(state: Statevector, control: int, target: int) -> None:
    v, ac, at = state._view2(control, target)
    hi0 = _take(v, ac, 1, at, 0)
    hi1 = _take(v, ac, 1, at, 1)
    tmp = hi0.copy()
    hi0[...] = hi1
    hi1[...] = tmp


def apply_swap(state: Statevector, a: int, b: int) -> None:
    v, aa, ab = state._view2(a, b)
    s01 = _take(v, aa, 0, ab, 1)
    s10 = _take(v, aa, 1, ab, 0)
    tmp = s01.copy()
    s01[...] = s10
    s10[...] = tmp


_PAULI = {"X": apply_x, "Y": apply_y, "Z": apply_z}


def apply_pauli(state: Statevector, pauli: str, q: int) -> None:
    if pauli != "I":
        _PAULI[pauli](state, q)


def apply_gate(state: Statevector, gate: GateOp) -> Statevector:
    """Apply one unitary gate in place and return the same state."""
    if any(q >= state.num_qubits for q in gate.qubits):
        raise SimulationError(f"{gate} addresses a qubit outside a {state.num_qubits}-qubit state")
    kind = gate.kind
    if kind == "H":
        apply_h(state, gate.qubits[0])
    elif kind == "X":
        apply_x(state, gate.qubits[0])
    elif kind == "CNOT":
        apply_cnot(state, *gate.qubits)
    elif kind == "SWAP":
        apply_swap(state, *gate.qubits)
    else:
        raise SimulationError(f"{kind} is not a unitary gate")
    return state


def simulate(circuit: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> Statevector:
    """Run every unitary op of ``circuit`` from ``|0...0>``."""
    state = init_state(circuit.width, max_qubits)
    for op in circuit.unitary_ops:
        apply_gate(state, op)
    return state


def sample_measurement(state: Statevector, rng: np.random.Generator) -> str:
    """Draw one full-register outcome as an MSB-left bitstring."""
    probs = state.probabilities()
    cdf = np.cumsum(probs)
    idx = int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right"))
    idx = min(idx, len(cdf) - 1)
    return format(idx, f"0{state.num_qubits}b")
