"""Shot sampling: ideal runs and noisy runs.

Noisy runs have two engines.

``trajectory`` re-simulates the full statevector for every shot, inserting
sampled Paulis after each gate.  It is the reference and is only practical
for small circuits.

``frame`` (the default) uses the fact that H, X, CNOT and SWAP are Clifford:
a Pauli inserted anywhere can be pushed to the end of the circuit, where only
its X part matters and flips a fixed set of measured bits.  Each shot is then
an ideal sample XOR the flips of its sampled error events.  This samples the
same distribution as ``trajectory`` exactly.

Shots are drawn in fixed blocks of ``SHOT_BLOCK``; block ``b`` gets its own
stream ``SeedSequence(seed, spawn_key=(b,))``, so results do not depend on
how many workers run the blocks.
"""

from __future__ import annotations

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ..circuit import Circuit, GateOp, TWO_QUBIT
from ..errors import SimulationError
from ..transpile import RoutedCircuit
from .noise import NoiseModel
from .statevector import DEFAULT_MAX_QUBITS, apply_gate, apply_pauli, init_state, simulate

SHOT_BLOCK = 1024
MAX_CLBITS = 64

PAULIS_1Q = ("X", "Y", "Z")
PAULIS_2Q = tuple(p for p in itertools.product("IXYZ", repeat=2) if p != ("I", "I"))


@dataclass(frozen=True)
class ShotRecord:
    register1: str
    register2: str
    shot: int

    @property
    def bits(self) -> str:
        return self.register1 + self.register2


def _logical(circuit: Circuit | RoutedCircuit) -> Circuit:
    return circuit.logical if isinstance(circuit, RoutedCircuit) else circuit


def _physical(circuit: Circuit | RoutedCircuit) -> Circuit:
    return circuit.circuit if isinstance(circuit, RoutedCircuit) else circuit


def _check_clbits(circuit: Circuit) -> None:
    if circuit.num_clbits > MAX_CLBITS:
        raise SimulationError(f"at most {MAX_CLBITS} classical bits supported, got {circuit.num_clbits}")


def _clbit_weight(circuit: Circuit, c: int) -> int:
    return 1 << (circuit.num_clbits - 1 - c)


def _measured_mask(circuit: Circuit) -> int:
    mask = 0
    for op in circuit.measurements:
        mask |= _clbit_weight(circuit, op.classical_target)
    return mask


@dataclass(frozen=True)
class IdealDistribution:
    """Outcome support (as classical-register ints) with its cumulative weights."""

    outcomes: np.ndarray
    cdf: np.ndarray

    def sample(self, u: np.ndarray) -> np.ndarray:
        idx = np.searchsorted(self.cdf, u * self.cdf[-1], side="right")
        np.minimum(idx, len(self.cdf) - 1, out=idx)
        return self.outcomes[idx]


@lru_cache(maxsize=32)
def ideal_distribution(circuit: Circuit, max_qubits: int = DEFAULT_MAX_QUBITS) -> IdealDistribution:
    _check_clbits(circuit)
    probs = simulate(circuit, max_qubits).probabilities()
    support = np.flatnonzero(probs > 1e-20)
    weights = probs[support]
    k = circuit.width
    outcomes = np.zeros(len(support), dtype=np.uint64)
    for op in circuit.measurements:
        q = op.qubits[0]
        bit = (support >> (k - 1 - q)) & 1
        outcomes |= bit.astype(np.uint64) << np.uint64(circuit.num_clbits - 1 - op.classical_target)
    return IdealDistribution(outcomes, np.cumsum(weights))


# -- Pauli frame -------------------------------------------------------------

@dataclass(frozen=True)
class FrameTable:
    """One row per noise location.

    ``flips[l, j]`` is the measured-bit flip mask caused by Pauli choice ``j``
    at location ``l``; only the first ``choices[l]`` columns are used.
    """

    prob: np.ndarray
    choices: np.ndarray
    flips: np.ndarray
    readout_mask: int

    @property
    def size(self) -> int:
        return len(self.prob)


def _noisy_steps(circuit: Circuit, model: NoiseModel) -> list[tuple[GateOp, float]]:
    """Unitary ops with SWAP split into 3 CNOTs, each paired with its error probability."""
    steps: list[tuple[GateOp, float]] = []
    for op in circuit.unitary_ops:
        if op.kind == "SWAP":
            p = model.p_swap if op.inserted else model.p2
            a, b = op.qubits
            for c, t in ((a, b), (b, a), (a, b)):
                steps.append((GateOp("CNOT", (c, t)), p))
        elif op.kind == "CNOT":
            steps.append((op, model.p2))
        else:
            steps.append((op, model.p1))
    return steps


def compile_frame(circuit: Circuit, model: NoiseModel) -> FrameTable:
    """Propagate every possible error event to the measured bits.

    Walks the circuit backwards keeping, for each qubit, the measured-bit
    flips produced by an X or a Z placed there and carried to the end.
    """
    _check_clbits(circuit)
    xs = [0] * circuit.width
    zs = [0] * circuit.width
    for op in circuit.measurements:
        xs[op.qubits[0]] |= _clbit_weight(circuit, op.classical_target)

    def image(pauli: str, q: int) -> int:
        if pauli == "X":
            return xs[q]
        if pauli == "Z":
            return zs[q]
        if pauli == "Y":
            return xs[q] ^ zs[q]
        return 0

    rows: list[tuple[float, int, list[int]]] = []
    for op, p in reversed(_noisy_steps(circuit, model)):
        if p > 0.0:
            if op.kind in TWO_QUBIT:
                a, b = op.qubits
                masks = [image(pa, a) ^ image(pb, b) for pa, pb in PAULIS_2Q]
            else:
                masks = [image(pa, op.qubits[0]) for pa in PAULIS_1Q]
            rows.append((p, len(masks), masks))
        if op.kind == "H":
            q = op.qubits[0]
            xs[q], zs[q] = zs[q], xs[q]
        elif op.kind == "CNOT":
            c, t = op.qubits
            xs[c] ^= xs[t]
            zs[t] ^= zs[c]
    rows.reverse()
    flips = np.zeros((len(rows), len(PAULIS_2Q)), dtype=np.uint64)
    for i, (_, n, masks) in enumerate(rows):
        flips[i, :n] = masks
    prob = np.array([r[0] for r in rows], dtype=float)
    choices = np.array([r[1] for r in rows], dtype=np.int64)
    readout = _measured_mask(circuit) if model.r > 0 else 0
    return FrameTable(prob, choices, flips, readout)


def _readout_weights(mask: int, num_clbits: int) -> np.ndarray:
    return np.array([1 << b for b in range(num_clbits) if (mask >> b) & 1], dtype=np.uint64)


def _sample_block(
    block: int,
    size: int,
    seed: int,
    ideal: IdealDistribution,
    frame: FrameTable | None,
    r: float,
    num_clbits: int,
) -> np.ndarray:
    rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(block,)))
    out = ideal.sample(rng.random(size))
    if frame is None:
        return out
    if frame.size:
        hits = rng.random((frame.size, size)) < frame.prob[:, None]
        loc, shot = np.nonzero(hits)
        if len(loc):
            pick = rng.integers(0, frame.choices[loc])
            np.bitwise_xor.at(out, shot, frame.flips[loc, pick])
    if r > 0 and frame.readout_mask:
        weights = _readout_weights(frame.readout_mask, num_clbits)
        flipped = rng.random((size, len(weights))) < r
        out ^= np.bitwise_or.reduce(np.where(flipped, weights, np.uint64(0)), axis=1)
    return out


def _run_blocks(shots: int, seed: int, workers: int, fn) -> np.ndarray:
    if shots < 0:
        raise SimulationError(f"shots must be >= 0, got {shots}")
    if shots == 0:
        return np.zeros(0, dtype=np.uint64)
    blocks = [(b, min(SHOT_BLOCK, shots - b * SHOT_BLOCK)) for b in range(-(-shots // SHOT_BLOCK))]
    if workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda bs: fn(*bs), blocks))
    else:
        parts = [fn(b, s) for b, s in blocks]
    return np.concatenate(parts)


def sample_ideal(
    circuit: Circuit | RoutedCircuit,
    shots: int,
    seed: int,
    workers: int = 1,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> np.ndarray:
    """Classical-register outcomes as ``uint64`` ints, MSB = classical bit 0."""
    ideal = ideal_distribution(_logical(circuit), max_qubits)
    num_clbits = _logical(circuit).num_clbits
    return _run_blocks(shots, seed, workers, lambda b, s: _sample_block(b, s, seed, ideal, None, 0.0, num_clbits))


def sample_noisy(
    circuit: Circuit | RoutedCircuit,
    model: NoiseModel,
    shots: int,
    seed: int,
    workers: int = 1,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> np.ndarray:
    """Pauli-frame sampler; same output convention as :func:`sample_ideal`.

    For a routed circuit the ideal part comes from the logical circuit (the
    router preserves it up to the tracked permutation) and the error events
    from the physical one.
    """
    model.check_swap_probability()
    logical = _logical(circuit)
    ideal = ideal_distribution(logical, max_qubits)
    frame = None if model.is_ideal else compile_frame(_physical(circuit), model)
    return _run_blocks(
        shots, seed, workers,
        lambda b, s: _sample_block(b, s, seed, ideal, frame, model.r, logical.num_clbits),
    )


def to_records(outcomes: np.ndarray, circuit: Circuit | RoutedCircuit) -> list[ShotRecord]:
    logical = _logical(circuit)
    width, split = logical.num_clbits, logical.register_split
    records = []
    for i, v in enumerate(outcomes.tolist()):
        bits = format(v, f"0{width}b")
        records.append(ShotRecord(bits[:split], bits[split:], i))
    return records


def run_ideal(
    circuit: Circuit | RoutedCircuit,
    shots: int,
    seed: int,
    workers: int = 1,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> list[ShotRecord]:
    """Simulate the unitary part once and draw ``shots`` outcomes."""
    return to_records(sample_ideal(circuit, shots, seed, workers, max_qubits), circuit)


def run_noisy(
    circuit: Circuit | RoutedCircuit,
    model: NoiseModel,
    shots: int,
    seed: int,
    method: str = "frame",
    workers: int = 1,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> list[ShotRecord]:
    if method == "frame":
        outcomes = sample_noisy(circuit, model, shots, seed, workers, max_qubits)
    elif method == "trajectory":
        outcomes = sample_trajectories(circuit, model, shots, seed, max_qubits)
    else:
        raise SimulationError(f"unknown noisy method {method!r}")
    return to_records(outcomes, circuit)


# -- reference trajectory engine --------------------------------------------

def _compact(circuit: Circuit) -> Circuit:
    """Relabel the qubits an op touches to ``0..k-1`` (order preserved)."""
    used = sorted({q for op in circuit.ops for q in op.qubits})
    if not used:
        used = [0]
    index = {q: i for i, q in enumerate(used)}
    ops = tuple(
        GateOp(op.kind, tuple(index[q] for q in op.qubits), op.classical_target, op.inserted)
        for op in circuit.ops
    )
    return Circuit(len(used), ops, circuit.register_split, circuit.num_clbits)


def sample_trajectories(
    circuit: Circuit | RoutedCircuit,
    model: NoiseModel,
    shots: int,
    seed: int,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> np.ndarray:
    """One full statevector trajectory per shot; shot ``i`` uses stream ``(seed, i)``."""
    model.check_swap_probability()
    physical = _compact(_physical(circuit))
    _check_clbits(physical)
    steps = _noisy_steps(physical, model)
    measures = [(op.qubits[0], _clbit_weight(physical, op.classical_target)) for op in physical.measurements]
    k = physical.width
    out = np.zeros(shots, dtype=np.uint64)
    for shot in range(shots):
        rng = np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(shot,)))
        state = init_state(k, max_qubits)
        for op, p in steps:
            apply_gate(state, op)
            if p > 0.0 and rng.random() < p:
                if op.kind in TWO_QUBIT:
                    pa, pb = PAULIS_2Q[rng.integers(len(PAULIS_2Q))]
                    apply_pauli(state, pa, op.qubits[0])
                    apply_pauli(state, pb, op.qubits[1])
                else:
                    apply_pauli(state, PAULIS_1Q[rng.integers(3)], op.qubits[0])
        probs = state.probabilities()
        cdf = np.cumsum(probs)
        idx = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), len(cdf) - 1)
        value = 0
        for q, weight in measures:
            bit = (idx >> (k - 1 - q)) & 1
            if model.r > 0 and rng.random() < model.r:
                bit ^= 1
            if bit:
                value |= weight
        out[shot] = value
    return out


# -- exact distributions for small registers ---------------------------------

def exact_outcome_distribution(
    circuit: Circuit | RoutedCircuit,
    model: NoiseModel,
    max_qubits: int = DEFAULT_MAX_QUBITS,
) -> np.ndarray:
    """Probability of every classical outcome under ``model`` (registers up to 16 bits)."""
    model.check_swap_probability()
    logical = _logical(circuit)
    if logical.num_clbits > 16:
        raise SimulationError("exact distribution limited to 16 classical bits")
    size = 1 << logical.num_clbits
    ideal = ideal_distribution(logical, max_qubits)
    dist = np.zeros(size)
    np.add.at(dist, ideal.outcomes.astype(np.int64), np.diff(ideal.cdf, prepend=0.0))
    dist /= dist.sum()
    index = np.arange(size)
    frame = compile_frame(_physical(circuit), model)
    for l in range(frame.size):
        p, n = frame.prob[l], int(frame.choices[l])
        mixed = (1.0 - p) * dist
        for mask in frame.flips[l, :n].astype(np.int64):
            mixed += (p / n) * dist[index ^ mask]
        dist = mixed
    if model.r > 0:
        for b in range(logical.num_clbits):
            if (frame.readout_mask >> b) & 1:
                dist = (1.0 - model.r) * dist + model.r * dist[index ^ (1 << b)]
    return dist
