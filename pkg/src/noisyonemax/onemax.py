"""OneMax genomes, noisy fitness and the random-number contract.

Bit positions are 1-based at the public boundary (``mutate_one_bit`` returns
and accepts ``k`` in ``1..n``) and 0-based inside the stored array.

Random streams
--------------
Every random draw in the package goes through :class:`RngStream`, a thin
owner of a NumPy ``Generator`` backed by the PCG64 bit generator. A stream
is fully determined by its 64-bit ``seed``: the generator is built as
``Generator(PCG64(seed))``, which NumPy seeds through ``SeedSequence(seed)``.
Child seeds are derived with :func:`derive_seed`::

    SeedSequence(entropy=master_seed, spawn_key=key).generate_state(1, uint64)[0]

so ``(master_seed, key)`` maps to a child seed bit-exactly on every platform.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

ALGORITHM_ID = "numpy.PCG64"


def derive_seed(master_seed: int, *key: int) -> int:
    """Derive a 64-bit child seed from a master seed and an integer key path.

    Distinct keys give statistically independent children; the mapping is the
    SeedSequence hash and does not depend on call order.
    """
    if master_seed < 0 or any(k < 0 for k in key):
        raise ValueError("seeds and key components must be non-negative")
    ss = np.random.SeedSequence(entropy=master_seed, spawn_key=tuple(int(k) for k in key))
    return int(ss.generate_state(1, dtype=np.uint64)[0])


class RngStream:
    """Single-owner deterministic random stream.

    Parameters
    ----------
    seed : int
        Non-negative 64-bit seed. Identical seeds give identical draw
        sequences.

    Notes
    -----
    Never share one stream between concurrent tasks; derive a child per task
    with :meth:`child` or :meth:`from_key`.
    """

    algorithm_id = ALGORITHM_ID

    def __init__(self, seed: int):
        seed = int(seed)
        if not 0 <= seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
        self.seed = seed
        self.generator = np.random.Generator(np.random.PCG64(seed))

    @classmethod
    def from_key(cls, master_seed: int, *key: int) -> "RngStream":
        return cls(derive_seed(master_seed, *key))

    def child(self, *key: int) -> "RngStream":
        """Independent stream keyed on this stream's seed; does not consume draws."""
        return RngStream.from_key(self.seed, *key)

    def standard_normal(self, size=None):
        return self.generator.standard_normal(size)

    def integers(self, low: int, high: int, size=None):
        """Uniform integers on ``[low, high)``."""
        return self.generator.integers(low, high, size=size)

    def random(self, size=None):
        """Uniform floats on ``[0, 1)``."""
        return self.generator.random(size)

    def __repr__(self) -> str:
        return f"RngStream(algorithm_id={self.algorithm_id!r}, seed={self.seed})"


@dataclass(frozen=True, eq=False)
class Genome:
    """Immutable bit string with a cached count of ones.

    Use :meth:`zeros`, :meth:`ones`, :meth:`from_bits` or :meth:`from_string`
    rather than the raw constructor.
    """

    bits: np.ndarray
    ones_count: int = field(default=-1)

    def __post_init__(self):
        bits = np.array(self.bits, dtype=np.uint8, copy=True).reshape(-1)
        if bits.size < 1:
            raise ValueError("genome length must be at least 1")
        if np.any(bits > 1):
            raise ValueError("genome bits must be 0 or 1")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)
        count = int(bits.sum())
        if self.ones_count not in (-1, count):
            raise ValueError("ones_count does not match bits")
        object.__setattr__(self, "ones_count", count)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "Genome":
        values = list(bits)
        if any(b not in (0, 1) for b in values):
            raise ValueError("genome bits must be 0 or 1")
        return cls(np.asarray(values, dtype=np.uint8))

    @classmethod
    def from_string(cls, s: str) -> "Genome":
        """``Genome.from_string("1011")``; the leftmost character is bit 1."""
        if not s or set(s) - {"0", "1"}:
            raise ValueError(f"not a bit string: {s!r}")
        return cls(np.frombuffer(s.encode("ascii"), dtype=np.uint8) - ord("0"))

    @classmethod
    def zeros(cls, n: int) -> "Genome":
        return cls(np.zeros(n, dtype=np.uint8))

    @classmethod
    def ones(cls, n: int) -> "Genome":
        return cls(np.ones(n, dtype=np.uint8))

    @classmethod
    def random(cls, n: int, rng: RngStream) -> "Genome":
        """Uniformly random genome; consumes ``n`` integer draws."""
        return cls(rng.integers(0, 2, size=n).astype(np.uint8))

    @property
    def n(self) -> int:
        return int(self.bits.size)

    def flipped(self, k: int) -> "Genome":
        """Copy with the 1-based bit ``k`` inverted."""
        if not 1 <= k <= self.n:
            raise IndexError(f"bit index {k} outside 1..{self.n}")
        bits = self.bits.copy()
        bits[k - 1] ^= 1
        delta = 1 if bits[k - 1] else -1
        out = object.__new__(Genome)
        bits.setflags(write=False)
        object.__setattr__(out, "bits", bits)
        object.__setattr__(out, "ones_count", self.ones_count + delta)
        return out

    def __len__(self) -> int:
        return self.n

    def __eq__(self, other) -> bool:
        if not isinstance(other, Genome):
            return NotImplemented
        return np.array_equal(self.bits, other.bits)

    def __hash__(self) -> int:
        return hash(self.bits.tobytes())

    def __str__(self) -> str:
        return (self.bits + ord("0")).tobytes().decode("ascii")

    def __repr__(self) -> str:
        s = str(self)
        if len(s) > 40:
            s = s[:18] + "..." + s[-18:]
        return f"Genome('{s}', n={self.n})"


@dataclass(frozen=True)
class NoiseModel:
    """Additive zero-mean Gaussian noise with standard deviation ``sigma``."""

    sigma: float = 1.0

    def __post_init__(self):
        if not self.sigma >= 0 or not np.isfinite(self.sigma):
            raise ValueError(f"sigma must be finite and non-negative, got {self.sigma}")


def true_fitness(g: Genome) -> int:
    """Noise-free OneMax fitness: the number of ones."""
    return g.ones_count


def sample_gaussian(mean: float, sigma: float, rng: RngStream) -> float:
    """One draw from N(mean, sigma**2).

    Always consumes exactly one standard-normal draw, including when
    ``sigma == 0`` (the result is then exactly ``mean``).
    """
    if sigma < 0:
        raise ValueError(f"sigma must be non-negative, got {sigma}")
    z = float(rng.standard_normal())
    return mean + sigma * z if sigma > 0 else float(mean)


def noisy_fitness(g: Genome, noise: NoiseModel, rng: RngStream) -> float:
    """``true_fitness(g)`` plus a fresh independent Gaussian draw."""
    return sample_gaussian(float(true_fitness(g)), noise.sigma, rng)


def mutate_one_bit(g: Genome, rng: RngStream, k: int | None = None) -> tuple[Genome, int]:
    """Flip one uniformly chosen bit.

    Returns the offspring and the 1-based index ``k`` that was flipped. Passing
    ``k`` forces the position and consumes no draw. ``g`` is left unchanged.
    """
    if k is None:
        k = int(rng.integers(0, g.n)) + 1
    return g.flipped(k), k


def genome_from(obj: Genome | str | Sequence[int]) -> Genome:
    if isinstance(obj, Genome):
        return obj
    if isinstance(obj, str):
        return Genome.from_string(obj)
    return Genome.from_bits(obj)
