"""Acceptance criteria, each run at its stated tolerance.

Every test records one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.  Run alone with ``pytest tests/test_acceptance.py -v``.
"""

import math
import time

import numpy as np
import pytest
from scipy.stats import spearmanr

from conftest import binomial_sigma, record_acceptance
from simonbench.bench.harness import (
    ExperimentConfig,
    algorithmic_error_rate,
    cnot_distance_experiment,
    linear_fit_extrapolate,
    predicted_cnot_failure,
    recover_secret_end_to_end,
    report,
    run_experiment,
)
from simonbench.circuit import OracleKind, build_simon_circuit, classical_oracle_eval
from simonbench.gf2 import brute_force_secret
from simonbench.sim import get_device, load_devices, noise_model_from_device, run_ideal, run_noisy, simulate
from simonbench.sim.noise import NoiseModel
from simonbench.transpile import Layout, all_to_all, heavy_hex_map, route, validate_routed

from test_transpile import permuted_expected, random_circuit, random_connected_map

pytestmark = pytest.mark.acceptance

DEVICES = sorted(load_devices())
N_RANGE = (2, 12)
REPETITIONS = 30


def _sweep(device, **kw):
    cfg = ExperimentConfig(n_range=N_RANGE, backend=f"noisy:{device}", repetitions=REPETITIONS, seed=2024, **kw)
    return run_experiment(cfg)


@pytest.fixture(scope="module")
def device_sweeps():
    return {d: _sweep(d) for d in DEVICES}


def _mean_and_se(rows):
    rates = np.array([r.error_rate for r in rows])
    return rates.mean(), rates.std(ddof=1) / math.sqrt(len(rates))


# 1 -------------------------------------------------------------------------

def test_c1_oracle_correctness():
    start = time.perf_counter()
    bad = []
    for kind in OracleKind:
        for n in range(2, 11):
            f = lambda x: classical_oracle_eval(kind, n, x)  # noqa: E731
            images = {}
            for x in range(1 << n):
                y = f(format(x, f"0{n}b"))
                images[y] = images.get(y, 0) + 1
            if set(images.values()) != {2} or brute_force_secret(f, n) != "1" * n:
                bad.append((kind.value, n))
    elapsed = time.perf_counter() - start
    ok = not bad and elapsed < 10
    record_acceptance("1 oracle correctness", ok, f"failures={bad} runtime={elapsed:.2f}s (<10s)")
    assert ok


# 2 -------------------------------------------------------------------------

def test_c2_ideal_case():
    worst, recovered = 0.0, True
    for kind in OracleKind:
        for n in range(2, 11):
            recs = run_ideal(build_simon_circuit(n, kind), 10_000, seed=n)
            worst = max(worst, algorithmic_error_rate(recs, "1" * n))
            for seed in range(5):
                cfg = ExperimentConfig(n_range=(n, n), oracles=(kind,), seed=seed)
                recovered &= recover_secret_end_to_end(cfg, max_attempts=500).secret == "1" * n
    ok = worst == 0.0 and recovered
    record_acceptance("2 ideal case", ok, f"max error rate={worst} all secrets recovered={recovered}")
    assert ok


# 3 -------------------------------------------------------------------------

def test_c3_readout_closed_form():
    shots, worst_z, lines = 100_000, 0.0, []
    for r in (0.005, 0.0132, 0.05):
        for n in (2, 6, 12):
            recs = run_noisy(build_simon_circuit(n, "complex"), NoiseModel(0.0, 0.0, r), shots, seed=int(r * 1e4) + n)
            got = algorithmic_error_rate(recs, "1" * n)
            want = (1 - (1 - 2 * r) ** n) / 2
            z = abs(got - want) / binomial_sigma(want, shots)
            worst_z = max(worst_z, z)
            lines.append(f"r={r} n={n} got={got:.5f} want={want:.5f}")
    ok = worst_z <= 3
    record_acceptance("3 readout closed form", ok, f"worst |z|={worst_z:.2f} (<=3); " + "; ".join(lines))
    assert ok


# 4 -------------------------------------------------------------------------

def test_c4_random_guessing():
    rng = np.random.default_rng(4)
    shots, worst_z = 100_000, 0.0
    for n in (2, 6, 12, 53):
        z_strings = ["".join(map(str, row)) for row in rng.integers(0, 2, size=(shots, n))]
        got = algorithmic_error_rate(z_strings, "1" * n)
        worst_z = max(worst_z, abs(got - 0.5) / binomial_sigma(0.5, shots))
    ok = worst_z <= 3
    record_acceptance("4 random-guess ceiling", ok, f"worst |z|={worst_z:.2f} (<=3)")
    assert ok


# 5 -------------------------------------------------------------------------

def test_c5_routing_soundness():
    worst, swaps_full, invalid = 0.0, 0, 0
    for case in range(100):
        rng = np.random.default_rng(50_000 + case)
        k = int(rng.integers(2, 11))
        width = int(rng.integers(2, k + 1))
        cmap = random_connected_map(rng, k)
        circuit = random_circuit(rng, width, int(rng.integers(1, 40)))
        layout = Layout(tuple(int(v) for v in rng.permutation(k)[:width]))
        routed = route(circuit, cmap, layout)
        invalid += not validate_routed(routed, cmap)
        got = simulate(routed.circuit).amplitudes
        want = permuted_expected(simulate(circuit).amplitudes, routed.final_layout.physical, k)
        worst = max(worst, float(np.max(np.abs(got - want))))
        swaps_full += route(circuit, all_to_all(k), layout).inserted_swap_count
    ok = worst <= 1e-10 and swaps_full == 0 and invalid == 0
    record_acceptance("5 routing soundness", ok,
                      f"max amplitude diff={worst:.1e} (<=1e-10) all-to-all swaps={swaps_full} invalid={invalid}")
    assert ok


# 6 -------------------------------------------------------------------------

def test_c6a_error_increases_with_n(device_sweeps):
    worst = []
    for device, table in device_sweeps.items():
        for oracle in ("complex", "simple"):
            reps = table.select(oracle=oracle).repetitions()
            rho, p = spearmanr([r.n for r in reps], [r.error_rate for r in reps])
            worst.append((rho > 0 and p < 0.01, device, oracle, rho, p))
    ok = all(w[0] for w in worst)
    detail = " ".join(f"{d}/{o[0]}:rho={rho:.2f},p={p:.0e}" for _, d, o, rho, p in worst)
    record_acceptance("6a error rate increasing in n", ok, detail)
    assert ok


def test_c6b_complex_at_least_simple(device_sweeps):
    # per n: complex mean must not be significantly (3 sigma) below simple mean
    violations, strict = [], 0
    total = 0
    for device, table in device_sweeps.items():
        for n in range(N_RANGE[0], N_RANGE[1] + 1):
            c, sc = _mean_and_se([r for r in table.select(oracle="complex").repetitions() if r.n == n])
            s, ss = _mean_and_se([r for r in table.select(oracle="simple").repetitions() if r.n == n])
            total += 1
            strict += c >= s
            if c - s < -3 * math.hypot(sc, ss):
                violations.append(f"{device}:n={n}")
    ok = not violations
    record_acceptance("6b complex >= simple", ok,
                      f"{strict}/{total} (device, n) cells with complex mean >= simple mean; violations={violations}")
    assert ok


@pytest.fixture(scope="module")
def swap_contrast():
    multiplier = 3.0
    kw = dict(oracles=("complex",), swap_error_multiplier=multiplier)
    return multiplier, _sweep("brisbane", topology="eagle127", **kw), _sweep("brisbane", topology="all-to-all", **kw)


def test_c6c_swap_penalty_on_eagle(swap_contrast):
    multiplier, eagle, full = swap_contrast
    n_star = min(n for (n, _), s in eagle.swap_counts.items() if s > 0)
    gaps, ok = {}, True
    for n in range(N_RANGE[0], N_RANGE[1] + 1):
        e, se = _mean_and_se([r for r in eagle.repetitions() if r.n == n])
        a, sa = _mean_and_se([r for r in full.repetitions() if r.n == n])
        gaps[n] = e - a
        sigma = math.hypot(se, sa)
        if n < n_star:
            ok &= abs(e - a) <= 3 * sigma + 1e-12
        else:
            ok &= e - a > 3 * sigma
    em, am = eagle.mean_by_n(), full.mean_by_n()
    rise_eagle = em[n_star + 1] - em[n_star - 1]
    rise_full = am[n_star + 1] - am[n_star - 1]
    ok &= rise_eagle > rise_full
    detail = (f"m={multiplier} first n with SWAPs={n_star}; rise over n={n_star - 1}..{n_star + 1}: "
              f"eagle {rise_eagle:.3f} vs all-to-all {rise_full:.3f}; gaps "
              + " ".join(f"{n}:{g:+.3f}" for n, g in gaps.items()))
    record_acceptance("6c SWAP penalty on eagle127", ok, detail)
    assert ok


# 7 -------------------------------------------------------------------------

@pytest.fixture(scope="module")
def cnot_rows():
    model = noise_model_from_device(get_device("brisbane"))
    model = NoiseModel(model.p1, model.p2, 0.0, model.swap_error_multiplier)  # readout off
    return model, cnot_distance_experiment(heavy_hex_map(), model, 39, range(40, 46), shots=100_000, seed=7)


def test_c7a_cnot_failure_increases_with_distance(cnot_rows):
    _, rows = cnot_rows
    distances = [r.distance for r in rows]
    observed = [r.observed for r in rows]
    ok = distances == list(range(1, 7)) and all(b > a for a, b in zip(observed, observed[1:]))
    record_acceptance("7a CNOT failure strictly increasing in d", ok,
                      " ".join(f"d={d}:{o:.5f}" for d, o in zip(distances, observed)))
    assert ok


def test_c7b_cnot_failure_matches_formula(cnot_rows):
    model, rows = cnot_rows
    zs = []
    for r in rows:
        want = predicted_cnot_failure(r.distance, model)
        zs.append((r.observed - want) / binomial_sigma(want, r.shots))
    ok = all(abs(z) <= 3 for z in zs)
    detail = " ".join(
        f"d={r.distance}:obs={r.observed:.5f},formula={r.predicted:.5f},exact={r.exact:.5f},z={z:+.1f}"
        for r, z in zip(rows, zs)
    )
    record_acceptance("7b CNOT failure vs 1-(1-p2*m)^(3(d-1)+1)", ok, detail)
    assert ok


# 8 -------------------------------------------------------------------------

def test_c8_extrapolation_reaches_ceiling(device_sweeps):
    results = {}
    for device, table in device_sweeps.items():
        for oracle in ("complex", "simple"):
            fit = linear_fit_extrapolate(table.select(oracle=oracle), 53)
            results[(device, oracle)] = fit
    ok = all(f.projected_rate == 0.5 for f in results.values())
    detail = " ".join(f"{d}/{o[0]}:raw={f.raw_projection:.2f}" for (d, o), f in results.items())
    record_acceptance("8 projection at n=53 clipped to 0.5", ok, detail)
    assert ok


# 9 -------------------------------------------------------------------------

def test_c9_determinism():
    cfg = ExperimentConfig(n_range=(2, 10), backend="noisy:kyoto", repetitions=4, seed=99)
    reports = {w: report(run_experiment(cfg, workers=w)) for w in (1, 2, 4, 8)}
    again = report(run_experiment(cfg, workers=1))
    ok = len(set(reports.values())) == 1 and again == reports[1]
    record_acceptance("9 determinism", ok, f"byte-identical CSV across workers {sorted(reports)} and rerun")
    assert ok
