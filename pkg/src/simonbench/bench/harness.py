"""Experiment harness: error-rate sweeps, secret recovery, CNOT distance, fits."""

from __future__ import annotations

import csv
import io
import json
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Iterable, Mapping, Sequence

import numpy as np

from ..circuit import CNOT, MEASURE, X, Circuit, OracleKind, build_simon_circuit, classical_oracle_eval
from ..errors import ConfigError, ExperimentError, SimonBenchError
from ..gf2 import Basis, add_if_independent, dot_mod2, pack, solve_secret
from ..sim import (
    DEFAULT_MAX_QUBITS,
    NoiseModel,
    ShotRecord,
    exact_outcome_distribution,
    get_device,
    noise_model_from_device,
    sample_ideal,
    sample_noisy,
)
from ..transpile import (
    CouplingMap,
    Layout,
    RoutedCircuit,
    all_to_all,
    load_coupling_map,
    place,
    route,
    shortest_path_distance,
    UNREACHABLE,
)

log = logging.getLogger(__name__)

CSV_COLUMNS = ("n", "oracle", "backend", "repetition", "shots", "error_rate", "seed")
MEAN = "mean"
DEFAULT_SHOTS = 4096
DEFAULT_REPETITIONS = 30
ADVANTAGE_QUBITS = 53
RANDOM_GUESS_RATE = 0.5


@dataclass(frozen=True)
class ExperimentConfig:
    n_range: tuple[int, int] = (2, 12)
    oracles: tuple[OracleKind, ...] = (OracleKind.COMPLEX, OracleKind.SIMPLE)
    backend: str = "ideal"
    topology: str = "auto"
    shots: int = DEFAULT_SHOTS
    repetitions: int = DEFAULT_REPETITIONS
    seed: int = 0
    swap_error_multiplier: float = 1.0
    noise_scale: float = 1.0
    placement: str = "greedy"
    noise: Mapping[str, float] | None = None
    secret: str | None = None
    devices_file: str | None = None
    workers: int = 1
    max_qubits: int = DEFAULT_MAX_QUBITS

    def __post_init__(self) -> None:
        lo, hi = self.n_range
        object.__setattr__(self, "n_range", (int(lo), int(hi)))
        object.__setattr__(self, "oracles", tuple(OracleKind.parse(o) for o in self.oracles))
        if lo < 2 or hi < lo:
            raise ConfigError(f"n_range must satisfy 2 <= lo <= hi, got {self.n_range}")
        if 2 * hi > self.max_qubits:
            raise ConfigError(f"n={hi} needs {2 * hi} qubits, simulator cap is {self.max_qubits}")
        if not self.oracles:
            raise ConfigError("at least one oracle kind is required")
        if self.shots < 1:
            raise ConfigError(f"shots must be >= 1, got {self.shots}")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.workers < 1:
            raise ConfigError(f"workers must be >= 1, got {self.workers}")
        if self.secret is not None and lo != hi:
            raise ConfigError("a custom secret needs a single n (n_range lo == hi)")
        if self.secret is not None and len(self.secret) != lo:
            raise ConfigError(f"secret {self.secret!r} is not {lo} bits")
        if not (self.backend == "ideal" or self.backend.startswith("noisy:")):
            raise ConfigError(f"backend must be 'ideal' or 'noisy:<device|custom>', got {self.backend!r}")
        if self.backend == "noisy:custom" and not self.noise:
            raise ConfigError("backend noisy:custom needs a 'noise' object with p1, p2, r")
        # surfaces unknown devices and bad probabilities at load time
        self.noise_model()

    @property
    def ns(self) -> range:
        return range(self.n_range[0], self.n_range[1] + 1)

    def secret_for(self, n: int) -> str:
        return self.secret if self.secret is not None else "1" * n

    def noise_model(self) -> NoiseModel | None:
        try:
            if self.backend == "ideal":
                return None
            name = self.backend.split(":", 1)[1]
            if name == "custom":
                noise = dict(self.noise or {})
                model = NoiseModel(
                    p1=float(noise.get("p1", 0.0)),
                    p2=float(noise.get("p2", 0.0)),
                    r=float(noise.get("r", 0.0)),
                    swap_error_multiplier=self.swap_error_multiplier,
                )
            else:
                device = get_device(name, self.devices_file)
                model = noise_model_from_device(device, self.swap_error_multiplier)
            return model.scaled(self.noise_scale) if self.noise_scale != 1.0 else model
        except SimonBenchError as exc:
            raise ConfigError(str(exc)) from None

    def coupling_map(self, n: int) -> CouplingMap:
        topo = self.topology
        if topo == "auto":
            if self.backend.startswith("noisy:") and self.backend != "noisy:custom":
                topo = get_device(self.backend.split(":", 1)[1], self.devices_file).topology_preset
            else:
                topo = "all-to-all"
        if topo in ("all-to-all", "all_to_all"):
            return all_to_all(2 * n)
        return load_coupling_map(topo)

    @classmethod
    def from_dict(cls, doc: Mapping[str, Any]) -> "ExperimentConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc) - known
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        kwargs = dict(doc)
        if "n_range" in kwargs:
            nr = kwargs["n_range"]
            if isinstance(nr, int):
                nr = (nr, nr)
            if not (isinstance(nr, (list, tuple)) and len(nr) == 2):
                raise ConfigError("n_range must be [lo, hi] or a single integer")
            kwargs["n_range"] = tuple(nr)
        if "oracles" in kwargs:
            o = kwargs["oracles"]
            kwargs["oracles"] = (o,) if isinstance(o, str) else tuple(o)
        try:
            return cls(**kwargs)
        except (TypeError, SimonBenchError) as exc:
            raise ConfigError(str(exc)) from None

    @classmethod
    def from_file(cls, path: str | Path) -> "ExperimentConfig":
        try:
            doc = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {path}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
        if not isinstance(doc, Mapping):
            raise ConfigError(f"{path}: config must be a JSON object")
        return cls.from_dict(doc)


@dataclass(frozen=True)
class ErrorRateRecord:
    n: int
    oracle: str
    backend: str
    repetition: int | str
    shots: int
    error_rate: float
    seed: int

    @property
    def is_mean(self) -> bool:
        return self.repetition == MEAN

    def sort_key(self) -> tuple:
        rep = (1, 0) if self.is_mean else (0, int(self.repetition))
        return (self.n, self.oracle, self.backend, rep)


@dataclass
class ErrorRateTable:
    records: list[ErrorRateRecord]
    # inserted SWAPs per (n, oracle), kept for analysis; not part of the CSV
    swap_counts: dict[tuple[int, str], int] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.records = sorted(self.records, key=ErrorRateRecord.sort_key)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, ErrorRateTable):
            return NotImplemented
        return self.records == other.records and self.swap_counts == other.swap_counts

    def repetitions(self) -> list[ErrorRateRecord]:
        return [r for r in self.records if not r.is_mean]

    def means(self) -> list[ErrorRateRecord]:
        return [r for r in self.records if r.is_mean]

    def select(self, oracle: str | None = None, backend: str | None = None) -> "ErrorRateTable":
        rows = [
            r for r in self.records
            if (oracle is None or r.oracle == oracle) and (backend is None or r.backend == backend)
        ]
        swaps = {k: v for k, v in self.swap_counts.items() if oracle is None or k[1] == oracle}
        return ErrorRateTable(rows, swaps)

    def mean_by_n(self) -> dict[int, float]:
        """Mean error rate per n, from repetition rows when present."""
        rows = self.repetitions() or self.means()
        acc: dict[int, list[float]] = {}
        for r in rows:
            acc.setdefault(r.n, []).append(r.error_rate)
        return {n: float(np.mean(v)) for n, v in sorted(acc.items())}


def error_rate_from_outcomes(outcomes: np.ndarray, s: str, num_clbits: int) -> tuple[int, int]:
    """(invalid, shots) for register-1 values packed at the top of each outcome."""
    n = len(s)
    z = outcomes >> np.uint64(num_clbits - n)
    parity = np.bitwise_count(z & np.uint64(pack(s))) & 1
    return int(parity.sum()), len(outcomes)


def algorithmic_error_rate(records: Sequence[ShotRecord] | Sequence[str], s: str) -> float:
    """Fraction of shots whose register-1 string has odd overlap with ``s``."""
    if not records:
        raise ExperimentError("no shots to score")
    invalid = 0
    for rec in records:
        z = rec.register1 if isinstance(rec, ShotRecord) else rec
        if len(z) != len(s):
            raise ExperimentError(f"register-1 string {z!r} does not match secret length {len(s)}")
        invalid += dot_mod2(z, s)
    return invalid / len(records)


def _job_seed(master: int, n: int, oracle_index: int, rep: int) -> int:
    ss = np.random.SeedSequence(master, spawn_key=(n, oracle_index, rep))
    return int(ss.generate_state(1, np.uint32)[0])


def prepare_circuit(config: ExperimentConfig, n: int, kind: OracleKind) -> RoutedCircuit:
    circuit = build_simon_circuit(n, kind, config.secret_for(n))
    cmap = config.coupling_map(n)
    layout = place(circuit, cmap, config.placement, seed=config.seed)
    return route(circuit, cmap, layout)


def run_experiment(config: ExperimentConfig, workers: int | None = None) -> ErrorRateTable:
    """Error rate for every (n, oracle, repetition), plus a mean row per (n, oracle)."""
    workers = config.workers if workers is None else workers
    model = config.noise_model()
    routed: dict[tuple[int, OracleKind], RoutedCircuit] = {}
    for n in config.ns:
        for kind in config.oracles:
            try:
                routed[(n, kind)] = prepare_circuit(config, n, kind)
            except SimonBenchError as exc:
                raise ExperimentError(f"n={n}, oracle={kind.value}: {exc}") from exc

    jobs = [
        (n, oi, kind, rep)
        for n in config.ns
        for oi, kind in enumerate(config.oracles)
        for rep in range(config.repetitions)
    ]

    def run_job(job: tuple[int, int, OracleKind, int]) -> ErrorRateRecord:
        n, oi, kind, rep = job
        seed = _job_seed(config.seed, n, oi, rep)
        circ = routed[(n, kind)]
        try:
            if model is None:
                outcomes = sample_ideal(circ, config.shots, seed, max_qubits=config.max_qubits)
            else:
                outcomes = sample_noisy(circ, model, config.shots, seed, max_qubits=config.max_qubits)
        except SimonBenchError as exc:
            raise ExperimentError(f"n={n}, oracle={kind.value}, repetition={rep}: {exc}") from exc
        invalid, shots = error_rate_from_outcomes(outcomes, config.secret_for(n), circ.logical.num_clbits)
        return ErrorRateRecord(n, kind.value, config.backend, rep, shots, invalid / shots, seed)

    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            rows = list(pool.map(run_job, jobs))
    else:
        rows = [run_job(j) for j in jobs]

    by_group: dict[tuple[int, str], list[ErrorRateRecord]] = {}
    for r in rows:
        by_group.setdefault((r.n, r.oracle), []).append(r)
    for (n, oracle), group in by_group.items():
        invalid = sum(round(r.error_rate * r.shots) for r in group)
        shots = sum(r.shots for r in group)
        rows.append(ErrorRateRecord(n, oracle, config.backend, MEAN, shots, invalid / shots, config.seed))
        log.info("n=%d oracle=%s mean error %.4f", n, oracle, invalid / shots)

    swaps = {(n, k.value): rc.inserted_swap_count for (n, k), rc in routed.items()}
    return ErrorRateTable(rows, swaps)


# -- end-to-end secret recovery ----------------------------------------------

@dataclass(frozen=True)
class RecoveryReport:
    n: int
    attempts: int
    accepted_rows: tuple[str, ...]
    corrupted_rows: int
    secret: str | None = None
    reason: str = ""


class RecoveryFailed(ExperimentError):
    def __init__(self, report: RecoveryReport):
        super().__init__(
            f"secret recovery failed ({report.reason}) after {report.attempts} attempts; "
            f"{report.corrupted_rows} measured rows were not orthogonal to the secret"
        )
        self.report = report


def recover_secret_end_to_end(config: ExperimentConfig, max_attempts: int) -> RecoveryReport:
    """Feed single-shot register-1 outcomes into the GF(2) solver until rank n-1.

    The candidate is accepted only if the classical oracle agrees
    ``f(0) == f(candidate)``.
    """
    lo, hi = config.n_range
    if lo != hi:
        raise ConfigError("secret recovery needs a single n")
    n, kind = lo, config.oracles[0]
    if max_attempts < n - 1:
        raise ConfigError(f"max_attempts must be >= n-1 = {n - 1}")
    true_s = config.secret_for(n)
    circ = prepare_circuit(config, n, kind)
    model = config.noise_model()
    seed = _job_seed(config.seed, n, 0, 0)
    if model is None:
        outcomes = sample_ideal(circ, max_attempts, seed, max_qubits=config.max_qubits)
    else:
        outcomes = sample_noisy(circ, model, max_attempts, seed, max_qubits=config.max_qubits)

    basis = Basis.empty(n)
    corrupted = 0
    width = circ.logical.num_clbits
    for attempt, value in enumerate(outcomes.tolist(), 1):
        z = format(value, f"0{width}b")[:n]
        if dot_mod2(z, true_s):
            corrupted += 1
        if "1" not in z:
            continue
        basis, _ = add_if_independent(basis, z)
        if basis.rank == n - 1:
            candidate = solve_secret(basis, n)
            zero = "0" * n
            rows = tuple(basis.as_strings())
            if classical_oracle_eval(kind, n, zero, true_s) != classical_oracle_eval(kind, n, candidate, true_s):
                raise RecoveryFailed(RecoveryReport(n, attempt, rows, corrupted, candidate, "verification failed"))
            return RecoveryReport(n, attempt, rows, corrupted, candidate)
    raise RecoveryFailed(RecoveryReport(n, max_attempts, tuple(basis.as_strings()), corrupted, None, "attempt budget exhausted"))


# -- CNOT vs distance --------------------------------------------------------

@dataclass(frozen=True)
class CnotDistanceRow:
    control: int
    target: int
    distance: int
    swaps: int
    shots: int
    failures: int
    observed: float
    predicted: float
    exact: float


def cnot_test_circuit() -> Circuit:
    """X on the control, one CNOT, measure both; the ideal outcome is 11."""
    return Circuit(2, (X(0), CNOT(0, 1), MEASURE(0, 0), MEASURE(1, 1)), register_split=1)


def predicted_cnot_failure(distance: int, model: NoiseModel) -> float:
    """Chance that at least one of the ``3(d-1) + 1`` physical CNOTs errs."""
    return 1.0 - (1.0 - model.p_swap) ** (3 * (distance - 1) + 1)


def cnot_distance_experiment(
    cmap: CouplingMap,
    model: NoiseModel,
    control: int,
    targets: Iterable[int],
    shots: int,
    seed: int = 0,
) -> list[CnotDistanceRow]:
    circuit = cnot_test_circuit()
    rows = []
    for i, target in enumerate(targets):
        d = shortest_path_distance(cmap, control, target)
        if d == UNREACHABLE:
            raise ExperimentError(f"target {target} is unreachable from control {control}")
        if d == 0:
            raise ExperimentError("control and target must differ")
        routed = route(circuit, cmap, Layout((control, target)))
        outcomes = sample_noisy(routed, model, shots, seed + i)
        failures = int(np.count_nonzero(outcomes != 0b11))
        exact = 1.0 - float(exact_outcome_distribution(routed, model)[0b11])
        rows.append(CnotDistanceRow(
            control, target, d, routed.inserted_swap_count, shots, failures,
            failures / shots, predicted_cnot_failure(d, model), exact,
        ))
    return rows


# -- linear fit and extrapolation --------------------------------------------

@dataclass(frozen=True)
class FitResult:
    slope: float
    intercept: float
    projected_n: int
    projected_rate: float
    raw_projection: float


def linear_fit_extrapolate(
    table: ErrorRateTable | Mapping[int, float],
    projected_n: int = ADVANTAGE_QUBITS,
) -> FitResult:
    """Least-squares line through (n, mean error rate), projected and capped at 0.5."""
    if isinstance(table, ErrorRateTable):
        groups = {(r.oracle, r.backend) for r in table.records}
        if len(groups) > 1:
            raise ExperimentError(f"table mixes {len(groups)} oracle/backend groups; select one first")
        points = table.mean_by_n()
    else:
        points = dict(table)
    if len(points) < 2:
        raise ExperimentError("need at least two distinct n values to fit a line")
    xs = np.array(list(points), dtype=float)
    ys = np.array(list(points.values()), dtype=float)
    slope, intercept = np.polyfit(xs, ys, 1)
    raw = float(slope * projected_n + intercept)
    return FitResult(float(slope), float(intercept), projected_n, min(max(raw, 0.0), RANDOM_GUESS_RATE), raw)


# -- reports -----------------------------------------------------------------

def _csv_value(v: Any) -> str:
    return repr(v) if isinstance(v, float) else str(v)


def report(table: ErrorRateTable, fmt: str = "csv") -> str:
    if not table.records:
        raise ExperimentError("cannot report an empty table")
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(CSV_COLUMNS)
        for r in table.records:
            writer.writerow([_csv_value(getattr(r, c)) for c in CSV_COLUMNS])
        return buf.getvalue()
    if fmt == "json":
        doc = {
            "columns": list(CSV_COLUMNS),
            "records": [asdict(r) for r in table.records],
            "swap_counts": [
                {"n": n, "oracle": o, "swaps": s} for (n, o), s in sorted(table.swap_counts.items())
            ],
        }
        return json.dumps(doc, indent=2) + "\n"
    raise ExperimentError(f"unknown report format {fmt!r} (expected csv or json)")


def _record_from_row(row: Mapping[str, Any]) -> ErrorRateRecord:
    rep = row["repetition"]
    if rep != MEAN:
        rep = int(rep)
    return ErrorRateRecord(
        int(row["n"]), str(row["oracle"]), str(row["backend"]), rep,
        int(row["shots"]), float(row["error_rate"]), int(row["seed"]),
    )


def parse_report(text: str, fmt: str | None = None) -> ErrorRateTable:
    if fmt is None:
        fmt = "json" if text.lstrip().startswith("{") else "csv"
    try:
        if fmt == "json":
            doc = json.loads(text)
            swaps = {(int(e["n"]), str(e["oracle"])): int(e["swaps"]) for e in doc.get("swap_counts", [])}
            return ErrorRateTable([_record_from_row(r) for r in doc["records"]], swaps)
        if fmt == "csv":
            reader = csv.DictReader(io.StringIO(text))
            if tuple(reader.fieldnames or ()) != CSV_COLUMNS:
                raise ExperimentError(f"CSV header must be {','.join(CSV_COLUMNS)}")
            return ErrorRateTable([_record_from_row(r) for r in reader])
    except (KeyError, ValueError, json.JSONDecodeError) as exc:
        raise ExperimentError(f"malformed {fmt} table: {exc}") from None
    raise ExperimentError(f"unknown report format {fmt!r}")


def read_report(path: str | Path) -> ErrorRateTable:
    path = Path(path)
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise ExperimentError(f"table file not found: {path}") from None
    fmt = "json" if path.suffix == ".json" else None
    return parse_report(text, fmt)
