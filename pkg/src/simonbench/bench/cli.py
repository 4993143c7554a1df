"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 experiment failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from dataclasses import asdict
from pathlib import Path
from typing import Sequence

from ..circuit import OracleKind, build_simon_circuit, classical_oracle_eval, emit_qasm
from ..errors import ConfigError, SimonBenchError, TopologyError
from ..gf2 import brute_force_secret
from ..sim import get_device, noise_model_from_device
from ..transpile import load_coupling_map, layout_report, place, route, validate_routed
from .harness import (
    ADVANTAGE_QUBITS,
    ExperimentConfig,
    cnot_distance_experiment,
    linear_fit_extrapolate,
    read_report,
    report,
    run_experiment,
)

EXIT_OK, EXIT_USAGE, EXIT_FAILURE = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse exits 2 by default
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _write(text: str, path: str | None) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def _targets(text: str) -> list[int]:
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if "-" in part:
            lo, hi = part.split("-", 1)
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out:
        raise UsageError("no targets given")
    return out


def _map(name: str):
    # a malformed map file is bad input, not a failed experiment
    try:
        return load_coupling_map(name)
    except TopologyError as exc:
        raise UsageError(str(exc)) from None


def cmd_run(args: argparse.Namespace) -> int:
    config = ExperimentConfig.from_file(args.config)
    table = run_experiment(config, workers=args.workers)
    _write(report(table, args.format), args.output)
    return EXIT_OK


def cmd_oracle_check(args: argparse.Namespace) -> int:
    n, kind = args.n, OracleKind.parse(args.kind)
    if not 2 <= n <= 16:
        raise UsageError("--n must be between 2 and 16 for exhaustive checking")
    secret = args.secret or "1" * n
    f = lambda x: classical_oracle_eval(kind, n, x, secret)  # noqa: E731
    images: dict[str, int] = {}
    for x in range(1 << n):
        y = f(format(x, f"0{n}b"))
        images[y] = images.get(y, 0) + 1
    two_to_one = all(c == 2 for c in images.values())
    period = brute_force_secret(f, n)
    circuit = build_simon_circuit(n, kind, secret)
    result = {
        "n": n,
        "oracle": kind.value,
        "secret": secret,
        "two_to_one": two_to_one,
        "period": period,
        "period_matches": period == secret,
        "two_qubit_gates": circuit.two_qubit_count,
    }
    print(json.dumps(result, indent=2))
    return EXIT_OK if two_to_one and period == secret else EXIT_FAILURE


def cmd_transpile(args: argparse.Namespace) -> int:
    circuit = build_simon_circuit(args.n, args.kind)
    cmap = _map(args.map)
    layout = place(circuit, cmap, args.strategy, seed=args.seed)
    routed = route(circuit, cmap, layout)
    check = validate_routed(routed, cmap)
    if not check:
        print(f"routing produced an invalid circuit at op {check.op_index}: {check.message}", file=sys.stderr)
        return EXIT_FAILURE
    qasm = emit_qasm(routed.circuit)
    rep = json.dumps(layout_report(routed, cmap), indent=2) + "\n"
    if args.qasm_out or args.report_out:
        _write(qasm, args.qasm_out)
        _write(rep, args.report_out)
    else:
        sys.stdout.write(qasm)
        sys.stdout.write("\n")
        sys.stdout.write(rep)
    return EXIT_OK


def cmd_cnot_distance(args: argparse.Namespace) -> int:
    cmap = _map(args.map)
    model = noise_model_from_device(get_device(args.device), args.multiplier)
    if args.no_readout:
        model = model.__class__(model.p1, model.p2, 0.0, model.swap_error_multiplier)
    rows = cnot_distance_experiment(cmap, model, args.control, _targets(args.targets), args.shots, args.seed)
    buf = io.StringIO()
    fields = list(asdict(rows[0]))
    writer = csv.DictWriter(buf, fields, lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in asdict(row).items()})
    _write(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_extrapolate(args: argparse.Namespace) -> int:
    table = read_report(args.input).select(oracle=args.oracle, backend=args.backend)
    fit = linear_fit_extrapolate(table, args.target_n)
    print(json.dumps(asdict(fit), indent=2))
    return EXIT_OK


def cmd_report(args: argparse.Namespace) -> int:
    table = read_report(args.input)
    _write(report(table, args.format), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="simonbench", description="Simon's algorithm noise benchmark.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("run", help="run an error-rate sweep from a JSON config")
    p.add_argument("--config", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")
    p.add_argument("--workers", type=int)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("oracle-check", help="exhaustively check an oracle's period")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=("simple", "complex"), required=True)
    p.add_argument("--secret")
    p.set_defaults(func=cmd_oracle_check)

    p = sub.add_parser("transpile", help="route a Simon circuit; print QASM and layout report")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--kind", choices=("simple", "complex"), required=True)
    p.add_argument("--map", required=True, help="coupling-map JSON file or preset (eagle127, all_to_all:K)")
    p.add_argument("--strategy", choices=("greedy", "trivial"), default="greedy")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--qasm-out")
    p.add_argument("--report-out")
    p.set_defaults(func=cmd_transpile)

    p = sub.add_parser("cnot-distance", help="CNOT failure versus hop distance")
    p.add_argument("--map", required=True)
    p.add_argument("--device", required=True)
    p.add_argument("--control", type=int, required=True)
    p.add_argument("--targets", required=True, help="e.g. 40-49 or 40,41,45")
    p.add_argument("--shots", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--multiplier", type=float, default=1.0)
    p.add_argument("--no-readout", action="store_true")
    p.add_argument("--output")
    p.set_defaults(func=cmd_cnot_distance)

    p = sub.add_parser("extrapolate", help="linear fit of mean error rate versus n")
    p.add_argument("--input", required=True)
    p.add_argument("--target-n", type=int, default=ADVANTAGE_QUBITS)
    p.add_argument("--oracle")
    p.add_argument("--backend")
    p.set_defaults(func=cmd_extrapolate)

    p = sub.add_parser("report", help="convert an error-rate table between CSV and JSON")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")
    p.add_argument("--output")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # --help and usage errors
        return int(exc.code or 0)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except (UsageError, ConfigError) as exc:
        print(f"simonbench: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except SimonBenchError as exc:
        print(f"simonbench: {exc}", file=sys.stderr)
        return EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
