import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from noisyonemax.onemax import Genome, RngStream
from noisyonemax.rmhc import PolicyConfig, accept_decision, run_noise_free, run_noisy

H10 = float(sum(Fraction(1, k) for k in range(1, 11)))


def mean_and_se(values):
    arr = np.asarray(values, dtype=float)
    return arr.mean(), arr.std(ddof=1) / math.sqrt(arr.size)


def noisy_evals(n, cfg, trials, master):
    return [run_noisy(n, Genome.zeros(n), cfg, RngStream.from_key(master, t)).evaluations_used for t in range(trials)]


class TestAcceptDecision:
    def test_tie_accepted(self):
        assert accept_decision(3.0, 3.0)

    def test_lower_rejected(self):
        assert not accept_decision(2.9, 3.0)

    def test_higher_accepted(self):
        assert accept_decision(3.1, 3.0)


class TestNoiseFree:
    def test_single_bit(self):
        res = run_noise_free(1, "0", 100, RngStream(0))
        assert res.solved and res.evaluations_used == 2 and res.generations == 1

    def test_coupon_collector_mean(self):
        evals = [run_noise_free(10, Genome.zeros(10), 10**6, RngStream.from_key(1, t)).evaluations_used
                 for t in range(1000)]
        mean, se = mean_and_se(evals)
        assert abs(mean - (10 * H10 + 1)) < 3 * se

    def test_budget_cutoff(self):
        res = run_noise_free(1000, Genome.zeros(1000), 5, RngStream(2))
        assert not res.solved
        assert res.evaluations_used <= 6
        assert res.final_true_fitness <= 5

    def test_never_decreases(self):
        res = run_noise_free(50, Genome.zeros(50), 10**6, RngStream(3), record_trajectory=True)
        fits = [f for _, f in res.trajectory]
        assert all(b - a in (0, 1) for a, b in zip(fits, fits[1:]))
        assert res.evaluations_used == res.generations + 1

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            run_noise_free(5, Genome.zeros(4), 10, RngStream(0))


class TestPolicyConfig:
    @pytest.mark.parametrize("kwargs", [dict(r=0), dict(budget=0), dict(sigma=-1.0), dict(r=1.5)])
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            PolicyConfig(**kwargs)


class TestRunNoisy:
    def test_already_optimal(self):
        res = run_noisy(5, Genome.ones(5), PolicyConfig(), RngStream(0))
        assert res.solved and res.evaluations_used == 0 and res.generations == 0

    def test_zero_noise_coupon_collector(self):
        mean, se = mean_and_se(noisy_evals(10, PolicyConfig(r=1, sigma=0.0), 1000, 11))
        assert abs(mean - 2 * 10 * H10) < 3 * se

    def test_table_r1(self):
        mean, _ = mean_and_se(noisy_evals(10, PolicyConfig(r=1, sigma=1.0), 10_000, 12))
        assert mean == pytest.approx(205.8283, rel=0.02)

    def test_table_r10(self):
        mean, _ = mean_and_se(noisy_evals(10, PolicyConfig(r=10, sigma=1.0), 10_000, 13))
        assert mean == pytest.approx(612.2250, rel=0.02)

    def test_budget_smaller_than_generation(self):
        res = run_noisy(100, Genome.zeros(100), PolicyConfig(r=5, budget=2), RngStream(0))
        assert not res.solved and res.evaluations_used == 10 and res.generations == 1

    def test_deterministic(self):
        cfg = PolicyConfig(r=3, store_statistic=True, sigma=1.0)
        a = run_noisy(30, Genome.zeros(30), cfg, RngStream(77), record_trajectory=True)
        b = run_noisy(30, Genome.zeros(30), cfg, RngStream(77), record_trajectory=True)
        assert a.trajectory == b.trajectory
        assert a.evaluations_used == b.evaluations_used
        assert a.state == b.state

    def test_follows_documented_draw_order(self):
        n, r = 12, 3
        res = run_noisy(n, Genome.zeros(n), PolicyConfig(r=r, sigma=1.0), RngStream(5), record_trace=True)
        rng = RngStream(5)
        ks = rng.integers(0, n, size=64)
        z = rng.standard_normal((64, 2, r))
        for rec in res.trace[:64]:
            g = rec.generation - 1
            assert rec.k == ks[g] + 1
            parent = round(rec.parent_readings[0] - z[g, 0, 0])
            np.testing.assert_allclose(rec.parent_readings, parent + z[g, 0], rtol=0, atol=1e-12)

    @given(
        n=st.integers(1, 25),
        r=st.integers(1, 6),
        sigma=st.sampled_from([0.0, 0.5, 1.0, 2.0]),
        store=st.booleans(),
        budget=st.integers(1, 3000),
        seed=st.integers(0, 2**32),
    )
    @settings(max_examples=60, deadline=None)
    def test_accounting_invariants(self, n, r, sigma, store, budget, seed):
        cfg = PolicyConfig(r=r, store_statistic=store, budget=budget, sigma=sigma)
        res = run_noisy(n, Genome.zeros(n), cfg, RngStream(seed), record_trajectory=True)
        assert res.evaluations_used == 2 * r * res.generations
        assert res.evaluations_used < budget + 2 * r
        assert res.solved == (res.final_true_fitness == n)
        assert res.solved or res.evaluations_used >= budget
        fits = [f for _, f in res.trajectory]
        assert all(abs(b - a) <= 1 for a, b in zip(fits, fits[1:]))
        assert res.final_true_fitness == fits[-1] == res.state.current.ones_count
        if store:
            assert res.state.M % r == 0
        else:
            assert res.state.M == 0

    @pytest.mark.parametrize("seed", range(5))
    def test_stored_statistic_is_running_mean(self, seed):
        r = 3
        cfg = PolicyConfig(r=r, store_statistic=True, sigma=1.0)
        res = run_noisy(15, Genome.zeros(15), cfg, RngStream(seed), record_trace=True)
        pool: list[float] = []
        for rec in res.trace:
            pooled = pool + list(rec.parent_readings)
            assert rec.reference == pytest.approx(np.mean(pooled), abs=1e-9)
            assert rec.accepted == (rec.fit_y >= rec.reference)
            assert rec.fit_y == pytest.approx(np.mean(rec.offspring_readings), abs=1e-9)
            pool = list(rec.offspring_readings) if rec.accepted else pooled
            assert rec.M == len(pool)
            assert rec.best_fit_so_far == pytest.approx(np.mean(pool), abs=1e-9)

    def test_without_statistic_compares_fresh_means(self):
        res = run_noisy(15, Genome.zeros(15), PolicyConfig(r=4, sigma=1.0), RngStream(9), record_trace=True)
        for rec in res.trace:
            assert rec.reference == pytest.approx(np.mean(rec.parent_readings), abs=1e-9)
            assert rec.M == 0

    @pytest.mark.parametrize("store", [False, True])
    def test_zero_noise_decisions_exact(self, store):
        cfg = PolicyConfig(r=2, store_statistic=store, sigma=0.0)
        res = run_noisy(20, Genome.zeros(20), cfg, RngStream(4), record_trace=True)
        for rec in res.trace:
            parent, child = rec.parent_readings[0], rec.offspring_readings[0]
            assert rec.accepted == (child > parent)

    def test_init_length_checked(self):
        with pytest.raises(ValueError):
            run_noisy(5, "1010", PolicyConfig(), RngStream(0))
