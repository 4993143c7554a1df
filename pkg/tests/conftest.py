import math
from functools import reduce

import numpy as np
import pytest

from simonbench.circuit import Circuit

I2 = np.eye(2)
H2 = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
X2 = np.array([[0, 1], [1, 0]])


def binomial_sigma(p: float, n: int) -> float:
    return math.sqrt(p * (1 - p) / n)


def within_3sigma(observed: float, expected: float, n: int) -> bool:
    return abs(observed - expected) <= 3 * binomial_sigma(expected, n) + 1e-12


def dense_unitary(circuit: Circuit) -> np.ndarray:
    """Full 2^k x 2^k matrix built from Kronecker products (line 0 = leftmost factor)."""
    k = circuit.width
    dim = 1 << k
    u = np.eye(dim, dtype=complex)
    for op in circuit.unitary_ops:
        if op.kind in ("H", "X"):
            mats = [I2] * k
            mats[op.qubits[0]] = H2 if op.kind == "H" else X2
            g = reduce(np.kron, mats)
        else:
            # permutation matrix on basis states
            g = np.zeros((dim, dim))
            for idx in range(dim):
                bits = list(format(idx, f"0{k}b"))
                a, b = op.qubits
                if op.kind == "CNOT":
                    if bits[a] == "1":
                        bits[b] = "0" if bits[b] == "1" else "1"
                else:
                    bits[a], bits[b] = bits[b], bits[a]
                g[int("".join(bits), 2), idx] = 1
        u = g @ u
    return u


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list[str] = []


def record_acceptance(criterion: str, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {criterion}: {'PASS' if ok else 'FAIL'} | {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
