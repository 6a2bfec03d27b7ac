"""Exit criteria for the package, one test per criterion.

Each test records a ``PASS``/``FAIL`` line that is printed in the pytest
terminal summary.
"""
import math
from fractions import Fraction

import numpy as np
import pytest

from conftest import ACCEPTANCE_LINES
from noisyonemax.harness import ExperimentConfig, persist_report, run_cell, sweep, table_config
from noisyonemax.onemax import Genome, RngStream
from noisyonemax.rmhc import run_noise_free
from noisyonemax.theory import (
    expected_evaluations,
    expected_generations,
    optimal_resampling,
    p_ta_resampled,
    simulate_chain_samples,
)

TABLE_R = (1, 2, 3, 4, 5, 10)
TABLE_THEORY = (205.8283, 238.5264, 276.3340, 317.9576, 362.4065, 612.2250)
TABLE_EMPIRICAL = (205.1998, 239.7504, 274.9920, 317.8848, 363.2520, 611.0060)


def record(number, title, ok, detail):
    ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}")
    assert ok, detail


def harmonic(n):
    return float(sum(Fraction(1, k) for k in range(1, n + 1)))


def test_1_table_theory():
    worst = 0.0
    for r, value in zip(TABLE_R, TABLE_THEORY):
        worst = max(worst, abs(expected_evaluations(10, r, 1.0).expected_evaluations - value))
    record(1, "Table-I theory column", worst <= 1e-3, f"max |error| = {worst:.2e} (tol 1e-3)")


def test_2_table_empirical():
    cfg = table_config(trials=10_000, master_seed=0)
    details, ok = [], True
    for r, theory, paper_emp in zip(TABLE_R, TABLE_THEORY, TABLE_EMPIRICAL):
        cell = run_cell(10, r, cfg)
        rel = abs(cell.mean_evaluations - theory) / theory
        z = abs(cell.mean_evaluations - paper_emp) / cell.std_error
        ok &= cell.success_count == cfg.trials and rel <= 0.02 and z <= 4
        details.append(f"r={r}: {cell.mean_evaluations:.2f} ({rel:.2%}, {z:.1f} SE)")
    record(2, "Table-I empirical column", ok, "; ".join(details))


def test_3_optimal_r_trend():
    dims = (10, 30, 100, 300, 1000)
    stars = [optimal_resampling(n, 1.0).r_star for n in dims]
    ok = stars[0] == 1 and all(b >= a for a, b in zip(stars, stars[1:]))
    record(3, "optimal r non-decreasing in n", ok, ", ".join(f"r*({n})={s}" for n, s in zip(dims, stars)))


def test_4_coupon_collector():
    worst = max(abs(expected_generations(n, 1.0) - n * harmonic(n)) for n in (1, 2, 10, 100, 1000))
    record(4, "p_ta = 1 gives n H_n", worst <= 1e-9, f"max |error| = {worst:.2e} (tol 1e-9)")


def test_5_chain_oracle():
    details, ok = [], True
    for n in (5, 10, 20):
        for r in (1, 3, 10):
            p = p_ta_resampled(r, 1.0)
            samples = simulate_chain_samples(n, p, 10**5, RngStream.from_key(5, n, r))
            se = samples.std(ddof=1) / math.sqrt(samples.size)
            z = abs(samples.mean() - expected_generations(n, p)) / se
            ok &= z <= 3
            details.append(f"({n},{r}) {z:.2f}")
    record(5, "Monte-Carlo chain vs recursion (SE units)", ok, ", ".join(details))


def test_6_stored_statistic_benefit():
    base = dict(n_list=(100,), r_list=(5,), sigma=1.0, trials=100, master_seed=6)
    plain = run_cell(100, 5, ExperimentConfig(**base))
    stored = run_cell(100, 5, ExperimentConfig(store_statistic=True, **base))
    se = math.hypot(plain.std_error, stored.std_error)
    ok = stored.mean_evaluations + 3 * se < plain.mean_evaluations
    record(6, "stored statistic lowers cost at n=100, r=5", ok,
           f"stored {stored.mean_evaluations:.0f} vs plain {plain.mean_evaluations:.0f}, 3 SE = {3 * se:.0f}")


def test_7_determinism(tmp_path):
    cfg = ExperimentConfig(n_list=(10, 30), r_list=(1, 3, 5), sigma=1.0, trials=50, master_seed=7)
    a, _ = persist_report(sweep(cfg), tmp_path / "a")
    b, _ = persist_report(sweep(cfg), tmp_path / "b")
    c, _ = persist_report(sweep(cfg, workers=2), tmp_path / "c")
    ok = a.read_bytes() == b.read_bytes() == c.read_bytes()
    record(7, "sweep CSV byte-identical on re-run", ok, f"{len(a.read_bytes())} bytes, serial x2 + 2 workers")


def test_8_noise_free_sanity():
    evals = np.array([run_noise_free(100, Genome.zeros(100), 10**7, RngStream.from_key(8, t)).evaluations_used
                      for t in range(1000)], dtype=float)
    target = 100 * harmonic(100) + 1
    se = evals.std(ddof=1) / math.sqrt(evals.size)
    z = abs(evals.mean() - target) / se
    record(8, "noise-free RMHC at n=100", z <= 3, f"mean {evals.mean():.2f} vs {target:.2f} ({z:.2f} SE)")
