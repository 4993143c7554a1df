"""Circuit IR, Simon oracle builders and OpenQASM 2.0 export.

Bitstrings are plain ``str`` objects written MSB-left: character ``i`` is the
value on qubit line ``i``.  Read as a binary numeral the same string is the
statevector index, so ``int(bits, 2)`` and ``format(v, f"0{n}b")`` convert
between the two forms.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import CircuitError

ONE_QUBIT = frozenset({"H", "X"})
TWO_QUBIT = frozenset({"CNOT", "SWAP"})
GATE_KINDS = ONE_QUBIT | TWO_QUBIT | {"MEASURE"}


class OracleKind(str, enum.Enum):
    SIMPLE = "simple"
    COMPLEX = "complex"

    @classmethod
    def parse(cls, value: "str | OracleKind") -> "OracleKind":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise CircuitError(f"unknown oracle kind {value!r} (expected simple or complex)") from None


@dataclass(frozen=True)
class GateOp:
    kind: str
    qubits: tuple[int, ...]
    classical_target: int | None = None
    # set by the router on SWAPs it inserts; the noise model keys off this
    inserted: bool = False

    def __post_init__(self) -> None:
        if self.kind not in GATE_KINDS:
            raise CircuitError(f"unknown gate kind {self.kind!r}")
        arity = 2 if self.kind in TWO_QUBIT else 1
        if len(self.qubits) != arity:
            raise CircuitError(f"{self.kind} takes {arity} qubit(s), got {self.qubits}")
        if len(set(self.qubits)) != len(self.qubits):
            raise CircuitError(f"{self.kind} qubits must be distinct, got {self.qubits}")
        if any(q < 0 for q in self.qubits):
            raise CircuitError(f"negative qubit index in {self.qubits}")
        if self.kind == "MEASURE":
            if self.classical_target is None or self.classical_target < 0:
                raise CircuitError("MEASURE needs a non-negative classical_target")
        elif self.classical_target is not None:
            raise CircuitError(f"{self.kind} does not take a classical target")

    @property
    def is_unitary(self) -> bool:
        return self.kind != "MEASURE"

    def __str__(self) -> str:
        if self.kind == "MEASURE":
            return f"MEASURE({self.qubits[0]}->c{self.classical_target})"
        return f"{self.kind}({', '.join(map(str, self.qubits))})"


def H(q: int) -> GateOp:
    return GateOp("H", (q,))


def X(q: int) -> GateOp:
    return GateOp("X", (q,))


def CNOT(control: int, target: int) -> GateOp:
    return GateOp("CNOT", (control, target))


def SWAP(a: int, b: int, inserted: bool = False) -> GateOp:
    return GateOp("SWAP", (a, b), inserted=inserted)


def MEASURE(q: int, c: int) -> GateOp:
    return GateOp("MEASURE", (q,), classical_target=c)


@dataclass(frozen=True)
class Circuit:
    """Immutable ordered gate list over ``width`` qubit lines.

    ``register_split`` separates register 1 (lines/bits ``[0, split)``) from
    register 2.  ``num_clbits`` defaults to ``width``.
    """

    width: int
    ops: tuple[GateOp, ...] = ()
    register_split: int | None = None
    num_clbits: int | None = None

    def __post_init__(self) -> None:
        if self.width < 1:
            raise CircuitError(f"circuit width must be >= 1, got {self.width}")
        object.__setattr__(self, "ops", tuple(self.ops))
        if self.register_split is None:
            object.__setattr__(self, "register_split", self.width)
        if self.num_clbits is None:
            object.__setattr__(self, "num_clbits", self.width)
        if not 0 <= self.register_split <= self.num_clbits:
            raise CircuitError(f"register_split {self.register_split} outside [0, {self.num_clbits}]")
        seen_measure = False
        for i, op in enumerate(self.ops):
            if any(q >= self.width for q in op.qubits):
                raise CircuitError(f"op {i} {op} touches a qubit outside width {self.width}")
            if op.kind == "MEASURE":
                seen_measure = True
                if op.classical_target >= self.num_clbits:
                    raise CircuitError(f"op {i} {op} writes outside {self.num_clbits} classical bits")
            elif seen_measure:
                raise CircuitError(f"op {i} {op} follows a measurement; measurements must come last")

    def append(self, *ops: GateOp) -> "Circuit":
        return self.extend(ops)

    def extend(self, ops: Iterable[GateOp]) -> "Circuit":
        return Circuit(self.width, self.ops + tuple(ops), self.register_split, self.num_clbits)

    @property
    def unitary_ops(self) -> tuple[GateOp, ...]:
        return tuple(op for op in self.ops if op.is_unitary)

    @property
    def measurements(self) -> tuple[GateOp, ...]:
        return tuple(op for op in self.ops if op.kind == "MEASURE")

    def count(self, kind: str) -> int:
        return sum(1 for op in self.ops if op.kind == kind)

    @property
    def two_qubit_count(self) -> int:
        return sum(1 for op in self.ops if op.kind in TWO_QUBIT)


def new_circuit(n: int) -> Circuit:
    """Empty Simon-shaped circuit: two registers of ``n`` lines each."""
    if n < 2:
        raise CircuitError(f"Simon circuits need n >= 2, got {n}")
    return Circuit(2 * n, (), register_split=n)


def ones(n: int) -> str:
    return "1" * n


def _check_secret(n: int, s: str | None) -> str:
    if s is None:
        return ones(n)
    if len(s) != n or set(s) - {"0", "1"}:
        raise CircuitError(f"secret must be a {n}-bit 0/1 string, got {s!r}")
    if "1" not in s:
        raise CircuitError("secret must be nonzero")
    return s


def build_simple_oracle(n: int, s: str | None = None) -> tuple[GateOp, ...]:
    """Chain oracle with the fewest two-qubit gates.

    For ``s = 1^n``: ``f(x)_i = x_i ^ x_{i+1}`` and ``f(x)_{n-1} = 0``, built as
    ``CNOT(x_i -> y_i), CNOT(x_{i+1} -> y_i)`` for each ``i < n-1``.  A general
    ``s`` chains only the lines where ``s`` is 1 and copies the others.
    """
    if n < 2:
        raise CircuitError(f"Simon circuits need n >= 2, got {n}")
    s = _check_secret(n, s)
    support = [i for i, b in enumerate(s) if b == "1"]
    ops: list[GateOp] = []
    for i in range(n):
        if s[i] == "0":
            ops.append(CNOT(i, n + i))
            continue
        k = support.index(i)
        if k + 1 < len(support):
            ops.append(CNOT(i, n + i))
            ops.append(CNOT(support[k + 1], n + i))
    return tuple(ops)


def build_complex_oracle(n: int, s: str | None = None) -> tuple[GateOp, ...]:
    """Copy-then-flip oracle with the most two-qubit gates.

    ``f(x) = x ^ (x_k * s)`` where ``k`` is the first 1 of ``s`` (line 0 for the
    all-ones secret): ``n`` copy CNOTs, then one CNOT from line ``k`` onto every
    ``y_i`` with ``s_i = 1``.  The back-to-back pair on ``y_k`` is kept on
    purpose.
    """
    if n < 2:
        raise CircuitError(f"Simon circuits need n >= 2, got {n}")
    s = _check_secret(n, s)
    k = s.index("1")
    ops = [CNOT(i, n + i) for i in range(n)]
    ops += [CNOT(k, n + i) for i in range(n) if s[i] == "1"]
    return tuple(ops)


def build_oracle(kind: OracleKind | str, n: int, s: str | None = None) -> tuple[GateOp, ...]:
    kind = OracleKind.parse(kind)
    if kind is OracleKind.SIMPLE:
        return build_simple_oracle(n, s)
    return build_complex_oracle(n, s)


def build_simon_circuit(n: int, kind: OracleKind | str, s: str | None = None) -> Circuit:
    """H on register 1, oracle, H on register 1, then measure every line.

    Register 2 is not measured mid-circuit; line ``i`` is read into bit ``i``.
    """
    circ = new_circuit(n)
    ops = [H(i) for i in range(n)]
    ops += build_oracle(kind, n, s)
    ops += [H(i) for i in range(n)]
    ops += [MEASURE(i, i) for i in range(2 * n)]
    return circ.extend(ops)


def classical_oracle_eval(kind: OracleKind | str, n: int, x: str, s: str | None = None) -> str:
    """Evaluate the oracle function classically (test reference)."""
    if len(x) != n or set(x) - {"0", "1"}:
        raise CircuitError(f"input must be a {n}-bit 0/1 string, got {x!r}")
    kind = OracleKind.parse(kind)
    s = _check_secret(n, s)
    bits = [int(b) for b in x]
    if kind is OracleKind.COMPLEX:
        k = s.index("1")
        out = [b ^ (bits[k] & int(si)) for b, si in zip(bits, s)]
    else:
        support = [i for i, b in enumerate(s) if b == "1"]
        out = [0] * n
        for i in range(n):
            if s[i] == "0":
                out[i] = bits[i]
                continue
            k = support.index(i)
            if k + 1 < len(support):
                out[i] = bits[i] ^ bits[support[k + 1]]
    return "".join(map(str, out))


def apply_classically(ops: Sequence[GateOp], width: int, bits: str) -> str:
    """Push a computational basis state through X/CNOT/SWAP gates."""
    state = [int(b) for b in bits]
    if len(state) != width:
        raise CircuitError(f"expected {width} bits, got {len(state)}")
    for op in ops:
        if op.kind == "X":
            state[op.qubits[0]] ^= 1
        elif op.kind == "CNOT":
            c, t = op.qubits
            state[t] ^= state[c]
        elif op.kind == "SWAP":
            a, b = op.qubits
            state[a], state[b] = state[b], state[a]
        elif op.kind == "H":
            raise CircuitError("H does not map basis states to basis states")
    return "".join(map(str, state))


# -- OpenQASM 2.0 ---------------------------------------------------------

_QASM_NAMES = {"H": "h", "X": "x", "CNOT": "cx", "SWAP": "swap"}
_QASM_KINDS = {v: k for k, v in _QASM_NAMES.items()}


def emit_qasm(circuit: Circuit) -> str:
    lines = [
        "OPENQASM 2.0;",
        'include "qelib1.inc";',
        f"qreg q[{circuit.width}];",
        f"creg c[{circuit.num_clbits}];",
    ]
    for op in circuit.ops:
        if op.kind == "MEASURE":
            lines.append(f"measure q[{op.qubits[0]}] -> c[{op.classical_target}];")
        else:
            args = ",".join(f"q[{q}]" for q in op.qubits)
            lines.append(f"{_QASM_NAMES[op.kind]} {args};")
    return "\n".join(lines) + "\n"


_STMT = re.compile(r"^(h|x|cx|swap)\s+(q\[\d+\](?:\s*,\s*q\[\d+\])*)$")
_MEAS = re.compile(r"^measure\s+q\[(\d+)\]\s*->\s*c\[(\d+)\]$")
_QREG = re.compile(r"^qreg\s+q\[(\d+)\]$")
_CREG = re.compile(r"^creg\s+c\[(\d+)\]$")


def parse_qasm(text: str, register_split: int | None = None) -> Circuit:
    """Read back the subset of OpenQASM 2.0 that :func:`emit_qasm` writes."""
    width = clbits = None
    ops: list[GateOp] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("//", 1)[0].strip()
        if not line:
            continue
        if not line.endswith(";"):
            raise CircuitError(f"line {lineno}: missing ';'")
        stmt = line[:-1].strip()
        if stmt == "OPENQASM 2.0" or stmt == 'include "qelib1.inc"':
            continue
        if m := _QREG.match(stmt):
            width = int(m.group(1))
        elif m := _CREG.match(stmt):
            clbits = int(m.group(1))
        elif m := _MEAS.match(stmt):
            ops.append(MEASURE(int(m.group(1)), int(m.group(2))))
        elif m := _STMT.match(stmt):
            qubits = tuple(int(q) for q in re.findall(r"q\[(\d+)\]", m.group(2)))
            ops.append(GateOp(_QASM_KINDS[m.group(1)], qubits))
        else:
            raise CircuitError(f"line {lineno}: unsupported statement {stmt!r}")
    if width is None:
        raise CircuitError("no qreg declaration")
    return Circuit(width, tuple(ops), register_split, clbits)
