"""Random Mutation Hill-Climbing on (noisy) OneMax.

Draw order
----------
Runs draw randomness in blocks so that a generation costs no NumPy call.
Block ``b`` (``b = 0, 1, ...``) holds ``min(64 * 2**b, 8192)`` generations.
For each block the engine first draws that many mutation positions with
``rng.integers(0, n, size=G)`` and then, for :func:`run_noisy` only,
``rng.standard_normal((G, 2, r))`` where ``[g, 0]`` are the parent's ``r``
readings and ``[g, 1]`` the offspring's. Unused draws of the last block are
discarded. The schedule is part of the reproducibility contract.

A noisy reading of a genome with true fitness ``f`` is ``f + sigma * z``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .onemax import Genome, NoiseModel, RngStream, genome_from

_FIRST_BLOCK = 64
_MAX_BLOCK = 8192


def _block_sizes():
    size = _FIRST_BLOCK
    while True:
        yield size
        size = min(2 * size, _MAX_BLOCK)


def accept_decision(fit_y: float, reference: float) -> bool:
    """Keep the offspring iff its measured fitness is at least the reference."""
    return fit_y >= reference


@dataclass(frozen=True)
class PolicyConfig:
    """Which RMHC variant to run.

    ``store_statistic=False`` compares fresh ``r``-sample means of parent and
    offspring each generation. ``True`` pools all readings of the parent since
    it became best-so-far.
    """

    r: int = 1
    store_statistic: bool = False
    budget: int = 10_000_000
    sigma: float = 1.0

    def __post_init__(self):
        if int(self.r) != self.r or self.r < 1:
            raise ValueError(f"r must be a positive integer, got {self.r}")
        if int(self.budget) != self.budget or self.budget < 1:
            raise ValueError(f"budget must be a positive integer, got {self.budget}")
        NoiseModel(self.sigma)

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.sigma)


@dataclass(frozen=True)
class SearchState:
    """Hill-climber state after the last completed generation.

    ``M`` counts the readings behind ``best_fit_so_far``; ``N`` counts all
    fitness evaluations.
    """

    current: Genome
    best_fit_so_far: float
    M: int
    N: int


class GenerationRecord(NamedTuple):
    generation: int
    k: int
    parent_readings: tuple[float, ...]
    offspring_readings: tuple[float, ...]
    reference: float
    fit_y: float
    accepted: bool
    best_fit_so_far: float
    M: int
    N: int


@dataclass
class RunResult:
    solved: bool
    evaluations_used: int
    generations: int
    final_true_fitness: int
    state: SearchState | None = None
    trajectory: list[tuple[int, int]] | None = None
    trace: list[GenerationRecord] | None = field(default=None, repr=False)


def run_noise_free(n: int, init, budget: int, rng: RngStream, record_trajectory: bool = False) -> RunResult:
    """Plain RMHC on noise-free OneMax.

    The initial genome is evaluated once; each generation evaluates only the
    offspring and keeps it when its fitness is at least the stored best.
    Stops at the optimum or once ``budget`` evaluations are used.
    """
    x0 = genome_from(init)
    if x0.n != n:
        raise ValueError(f"initial genome has length {x0.n}, expected {n}")
    if budget < 1:
        raise ValueError("budget must be >= 1")
    bits = bytearray(x0.bits.tobytes())
    ones = x0.ones_count
    best = ones
    N = 1
    gen = 0
    traj = [(0, ones)] if record_trajectory else None
    blocks = _block_sizes()
    while ones < n and N < budget:
        for k in rng.integers(0, n, size=next(blocks)).tolist():
            fit_y = ones - 1 if bits[k] else ones + 1
            N += 1
            gen += 1
            if fit_y >= best:
                bits[k] ^= 1
                ones = fit_y
                best = fit_y
            if traj is not None:
                traj.append((gen, ones))
            if ones >= n or N >= budget:
                break
    final = Genome(np.frombuffer(bytes(bits), dtype=np.uint8))
    return RunResult(
        solved=ones == n,
        evaluations_used=N,
        generations=gen,
        final_true_fitness=ones,
        state=SearchState(final, float(best), 0, N),
        trajectory=traj,
    )


def run_noisy(
    n: int,
    init,
    cfg: PolicyConfig,
    rng: RngStream,
    record_trajectory: bool = False,
    record_trace: bool = False,
) -> RunResult:
    """RMHC with ``r`` resamples per genome on noisy OneMax.

    Every generation spends ``2 r`` evaluations: ``r`` fresh readings of the
    parent and ``r`` of the offspring. With ``cfg.store_statistic`` the parent
    reference is the running mean over all of its readings since it became
    best-so-far; otherwise it is just this generation's parent mean.

    Whether the optimum has been reached is checked with the noise-free
    fitness after each generation. This check is never counted in ``N`` and
    never feeds back into acceptance. The budget is checked only between
    generations, so ``N`` is always a multiple of ``2 r``.

    Parameters
    ----------
    record_trajectory : bool
        Keep ``(generation, true_fitness)`` after every generation.
    record_trace : bool
        Keep every reading and decision (:class:`GenerationRecord`); slow and
        memory hungry, meant for tests and debugging.
    """
    x0 = genome_from(init)
    if x0.n != n:
        raise ValueError(f"initial genome has length {x0.n}, expected {n}")
    r = cfg.r
    sigma = float(cfg.sigma)
    store = cfg.store_statistic
    budget = cfg.budget
    cost = 2 * r

    bits = bytearray(x0.bits.tobytes())
    ones = x0.ones_count
    best_fit = 0.0
    M = 0
    N = 0
    gen = 0
    traj = [(0, ones)] if record_trajectory else None
    trace = [] if record_trace else None
    blocks = _block_sizes()

    while ones < n and N < budget:
        size = next(blocks)
        ks = rng.integers(0, n, size=size).tolist()
        noise = rng.standard_normal((size, 2, r))
        if sigma != 1.0:
            noise *= sigma
        if r == 1:
            nx = noise[:, 0, 0].tolist()
            ny = noise[:, 1, 0].tolist()
        else:
            nx = noise[:, 0, :].mean(axis=1).tolist()
            ny = noise[:, 1, :].mean(axis=1).tolist()
        for g in range(size):
            k = ks[g]
            parent = ones
            child = ones - 1 if bits[k] else ones + 1
            fit_x = ones + nx[g]
            fit_y = child + ny[g]
            N += cost
            gen += 1
            if store:
                reference = (best_fit * M + fit_x * r) / (M + r)
            else:
                reference = fit_x
            accepted = fit_y >= reference
            if accepted:
                bits[k] ^= 1
                ones = child
            if store:
                if accepted:
                    best_fit = fit_y
                    M = r
                else:
                    best_fit = reference
                    M += r
            if traj is not None:
                traj.append((gen, ones))
            if trace is not None:
                trace.append(
                    GenerationRecord(
                        generation=gen,
                        k=k + 1,
                        parent_readings=tuple((parent + noise[g, 0]).tolist()),
                        offspring_readings=tuple((child + noise[g, 1]).tolist()),
                        reference=reference,
                        fit_y=fit_y,
                        accepted=accepted,
                        best_fit_so_far=best_fit,
                        M=M,
                        N=N,
                    )
                )
            if ones >= n or N >= budget:
                break

    final = Genome(np.frombuffer(bytes(bits), dtype=np.uint8))
    if not store:
        # without a stored statistic the state carries no history
        best_fit, M = 0.0, 0
    return RunResult(
        solved=ones == n,
        evaluations_used=N,
        generations=gen,
        final_true_fitness=ones,
        state=SearchState(final, best_fit, M, N),
        trajectory=traj,
        trace=trace,
    )

