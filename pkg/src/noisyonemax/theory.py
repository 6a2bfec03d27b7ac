"""Exact expected runtime of RMHC with resampling on noisy OneMax.

The search is summarised by the number of ones ``i``. One generation moves
``i -> i+1`` with probability ``(n-i)/n * p_ta``, ``i -> i-1`` with
``i/n * (1-p_ta)`` and stays otherwise; state ``n`` is absorbing. The
expected number of generations spent going from ``i`` to ``i+1`` obeys a
first-order recursion, so the full hitting time from the all-zeros string
costs O(n).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .onemax import RngStream


class RecursionOverflowError(OverflowError):
    """The hitting-time recursion left the range of double precision."""


def erf(x: float) -> float:
    """Error function, accurate to a few ulp (libm ``erf``)."""
    return math.erf(x)


def _check_sigma(sigma: float) -> None:
    if not sigma > 0 or not math.isfinite(sigma):
        raise ValueError(f"sigma must be finite and > 0, got {sigma}; use p_ta = 1 for the noise-free limit")


def p_ta_case1(sigma: float = 1.0) -> float:
    """Acceptance probability of a true improvement, one evaluation per genome.

    The difference of two single noisy readings is N(0, 2 sigma^2) and the true
    gap is 1, giving ``1/2 + erf(1 / (2 sigma)) / 2``.
    """
    _check_sigma(sigma)
    return 0.5 + 0.5 * erf(1.0 / (2.0 * sigma))


def p_ta_resampled(r: int, sigma: float = 1.0) -> float:
    """Acceptance probability with ``r`` resamples per genome and no history."""
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    _check_sigma(sigma)
    return 0.5 + 0.5 * erf(math.sqrt(r) / (2.0 * sigma))


def p_ta_with_history(r: int, M: int, sigma: float = 1.0) -> float:
    """Acceptance probability when the parent's estimate pools ``M + r`` readings.

    Offspring mean has variance sigma^2/r, parent running mean sigma^2/(M+r).
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    if M < 0:
        raise ValueError(f"M must be >= 0, got {M}")
    _check_sigma(sigma)
    return 0.5 + 0.5 * erf(math.sqrt(r * (M + r) / (2.0 * (M + 2 * r))) / sigma)


@dataclass(frozen=True)
class AcceptanceProbs:
    """True/false acceptance and rejection probabilities of one comparison.

    Under symmetric additive noise a true rejection is as likely as a true
    acceptance, so everything follows from ``p_ta``.
    """

    p_ta: float

    def __post_init__(self):
        if not 0.0 <= self.p_ta <= 1.0:
            raise ValueError(f"p_ta must lie in [0, 1], got {self.p_ta}")

    @property
    def p_fa(self) -> float:
        return 1.0 - self.p_ta

    @property
    def p_tr(self) -> float:
        return self.p_ta

    @property
    def p_fr(self) -> float:
        return 1.0 - self.p_tr


class Transition(NamedTuple):
    up: float
    stay: float
    down: float


def transition_probs(n: int, i: int, acc: AcceptanceProbs | float) -> Transition:
    """One-generation transition probabilities out of state ``i``."""
    if not 0 <= i <= n - 1:
        raise ValueError(f"state {i} outside 0..{n - 1}")
    if not isinstance(acc, AcceptanceProbs):
        acc = AcceptanceProbs(float(acc))
    up = (n - i) / n * acc.p_ta
    down = i / n * acc.p_fa
    stay = i / n * acc.p_tr + (n - i) / n * acc.p_fr
    return Transition(up, stay, down)


def _check_p_ta(p_ta: float) -> None:
    if not 0.5 < p_ta <= 1.0:
        raise ValueError(f"p_ta must lie in (0.5, 1], got {p_ta}")


def step_expectations(n: int, p_ta: float) -> np.ndarray:
    """Expected generations for each move ``i -> i+1``, ``i = 0..n-1``.

    Raises
    ------
    RecursionOverflowError
        If an intermediate value is not finite.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _check_p_ta(p_ta)
    out = np.empty(n)
    prev = 1.0 / p_ta
    out[0] = prev
    q = 1.0 - p_ta
    for i in range(1, n):
        prev = i * q / ((n - i) * p_ta) * prev + n / ((n - i) * p_ta)
        if not math.isfinite(prev):
            raise RecursionOverflowError(f"hitting-time recursion overflowed at state {i} (n={n}, p_ta={p_ta!r})")
        out[i] = prev
    return out


def expected_generations(n: int, p_ta: float) -> float:
    """Expected generations from the all-zeros string to the optimum."""
    total = math.fsum(step_expectations(n, p_ta))
    if not math.isfinite(total):
        raise RecursionOverflowError(f"expected generation count overflowed (n={n}, p_ta={p_ta!r})")
    return total


@dataclass(frozen=True)
class TheoryResult:
    n: int
    r: int
    sigma: float
    p_ta: float
    expected_generations: float
    expected_evaluations: float
    per_step: tuple[float, ...]


def theory_from_p_ta(n: int, r: int, p_ta: float, sigma: float = float("nan")) -> TheoryResult:
    """Assemble a :class:`TheoryResult` for an explicit ``p_ta``.

    Bypasses the noise model; useful for checking the recursion in isolation.
    """
    if r < 1:
        raise ValueError(f"r must be >= 1, got {r}")
    steps = step_expectations(n, p_ta)
    gens = math.fsum(steps)
    if not math.isfinite(gens):
        raise RecursionOverflowError(f"expected generation count overflowed (n={n}, r={r})")
    return TheoryResult(
        n=n,
        r=r,
        sigma=sigma,
        p_ta=p_ta,
        expected_generations=gens,
        expected_evaluations=2 * r * gens,
        per_step=tuple(float(s) for s in steps),
    )


def expected_evaluations(n: int, r: int, sigma: float = 1.0) -> TheoryResult:
    """Expected fitness evaluations ``2 r E[n|0]`` without a stored statistic."""
    return theory_from_p_ta(n, r, p_ta_resampled(r, sigma), sigma)


class OptimalResampling(NamedTuple):
    r_star: int
    cost: float
    bound_hit: bool
    costs: tuple[float, ...]


def optimal_resampling(n: int, sigma: float = 1.0, r_max: int = 10_000, patience: int = 20) -> OptimalResampling:
    """Resampling number minimising the expected evaluation count.

    Scans ``r = 1, 2, ...`` without assuming the cost curve is unimodal. The
    scan stops early once the cost has risen for ``patience`` consecutive
    values of ``r`` and exceeds twice the incumbent minimum. Ties keep the
    smallest ``r``. ``bound_hit`` is set when ``r_max`` was reached before the
    stopping rule fired; ``costs[j]`` is the cost at ``r = j + 1``.
    """
    if r_max < 1:
        raise ValueError(f"r_max must be >= 1, got {r_max}")
    _check_sigma(sigma)
    costs: list[float] = []
    best_r, best_cost = 0, math.inf
    rising = 0
    stopped = False
    for r in range(1, r_max + 1):
        cost = expected_evaluations(n, r, sigma).expected_evaluations
        if costs and cost > costs[-1]:
            rising += 1
        else:
            rising = 0
        costs.append(cost)
        if cost < best_cost:
            best_r, best_cost = r, cost
        if rising >= patience and cost > 2.0 * best_cost:
            stopped = True
            break
    return OptimalResampling(best_r, best_cost, not stopped, tuple(costs))


def simulate_chain(n: int, p_ta: float, episodes: int, rng: RngStream) -> float:
    """Monte-Carlo mean absorption time of the ones-count chain from state 0.

    All episodes advance in lockstep; each generation consumes one uniform
    draw per still-running episode.
    """
    return float(simulate_chain_samples(n, p_ta, episodes, rng).mean())


def simulate_chain_samples(n: int, p_ta: float, episodes: int, rng: RngStream) -> np.ndarray:
    """Per-episode absorption times; see :func:`simulate_chain`."""
    if episodes < 1:
        raise ValueError("episodes must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    states = np.zeros(episodes, dtype=np.int64)
    times = np.zeros(episodes, dtype=np.int64)
    active = np.arange(episodes)
    while active.size:
        i = states[active]
        u = rng.random(active.size)
        up = (n - i) / n * p_ta
        down = i / n * (1.0 - p_ta)
        step = np.where(u < up, 1, np.where(u < up + down, -1, 0))
        states[active] = i + step
        times[active] += 1
        active = active[states[active] < n]
    return times
