"""Finite populations and uniform sampling with/without replacement.

The population is always identified with the index set {0, ..., N-1}.
Sampling without replacement uses a partial Fisher-Yates shuffle (exactly
uniform over ordered m-arrangements, O(m) swaps after an O(N) buffer).
Exhaustive enumerators back the brute-force oracles used elsewhere.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations, product
from typing import Iterator

import numpy as np

from .errors import ConfigurationError, OracleScaleError

DEFAULT_ENUM_BUDGET = 10**6


class SampleMode(Enum):
    WITH_REPLACEMENT = "with_replacement"
    WITHOUT_REPLACEMENT = "without_replacement"


@dataclass(frozen=True)
class GroundSet:
    """A finite population of size N, indexed 0..N-1."""

    size: int

    def __post_init__(self):
        if self.size < 1:
            raise ConfigurationError(f"population size must be >= 1, got {self.size}")

    @property
    def ids(self) -> np.ndarray:
        return np.arange(self.size)


@dataclass(frozen=True)
class SampleScheme:
    """How to draw: mode plus sample size m."""

    mode: SampleMode
    m: int

    def validate_for(self, gs: GroundSet) -> None:
        if self.m < 1:
            raise ConfigurationError(f"sample size must be >= 1, got {self.m}")
        if self.mode is SampleMode.WITHOUT_REPLACEMENT and self.m > gs.size:
            raise ConfigurationError(
                f"cannot draw {self.m} distinct items from population of {gs.size}"
            )


@dataclass(frozen=True)
class RngStream:
    """A reproducible, independently-seeded random stream.

    Identical (master_seed, stream_index) pairs always yield the identical
    draw sequence; distinct stream indices are statistically independent.
    Monte Carlo experiments assign disjoint stream indices to blocks of
    trials so results do not depend on scheduling.
    """

    master_seed: int
    stream_index: int = 0

    def __post_init__(self):
        if self.stream_index < 0:
            raise ConfigurationError("stream_index must be nonnegative")

    def generator(self) -> np.random.Generator:
        ss = np.random.SeedSequence(self.master_seed, spawn_key=(self.stream_index,))
        return np.random.default_rng(ss)

    def substream(self, index: int) -> "RngStream":
        """Derive a child stream; used to split one experiment into blocks."""
        ss = np.random.SeedSequence(
            self.master_seed, spawn_key=(self.stream_index, index)
        )
        return _DerivedStream(self.master_seed, self.stream_index, ss, index)


class _DerivedStream(RngStream):
    """RngStream backed by a child SeedSequence (internal)."""

    def __init__(self, master_seed, stream_index, seed_seq, child_index):
        object.__setattr__(self, "master_seed", master_seed)
        object.__setattr__(self, "stream_index", stream_index)
        object.__setattr__(self, "_seed_seq", seed_seq)
        object.__setattr__(self, "_child_index", child_index)

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(self._seed_seq)

    def substream(self, index: int) -> "RngStream":
        ss = np.random.SeedSequence(
            self.master_seed,
            spawn_key=(self.stream_index, self._child_index, index),
        )
        return _DerivedStream(self.master_seed, self.stream_index, ss, index)


def draw_sample(gs: GroundSet, scheme: SampleScheme, rng: RngStream) -> np.ndarray:
    """Draw one sample of indices according to the scheme.

    Without replacement the result is a uniformly random ordered
    m-arrangement of distinct indices; with replacement it is m i.i.d.
    uniform indices.
    """
    scheme.validate_for(gs)
    gen = rng.generator()
    n, m = gs.size, scheme.m
    if scheme.mode is SampleMode.WITH_REPLACEMENT:
        return gen.integers(0, n, size=m)
    # partial Fisher-Yates: swap a uniform j in [i, n) into position i
    buf = np.arange(n)
    js = gen.integers(np.arange(m), n)
    for i in range(m):
        j = js[i]
        buf[i], buf[j] = buf[j], buf[i]
    return buf[:m].copy()


def batch_sample_without_replacement(
    n: int, m: int, count: int, gen: np.random.Generator
) -> np.ndarray:
    """Draw `count` independent uniform m-subsets of {0..n-1} at once.

    Uses random-key selection (argpartition of i.i.d. uniforms), which is
    exactly uniform over unordered subsets; order within a row is arbitrary.
    Returns a (count, m) index array.
    """
    if not 1 <= m <= n:
        raise ConfigurationError(f"need 1 <= m <= n, got m={m}, n={n}")
    keys = gen.random((count, n))
    if m == n:
        return np.tile(np.arange(n), (count, 1))
    return np.argpartition(keys, m, axis=1)[:, :m]


def enumerate_without_replacement(
    gs: GroundSet, m: int, budget: int = DEFAULT_ENUM_BUDGET
) -> Iterator[tuple[int, ...]]:
    """Yield every unordered m-subset of the population, lexicographically."""
    if m > gs.size:
        raise ConfigurationError(f"m={m} exceeds population size {gs.size}")
    total = math.comb(gs.size, m)
    if total > budget:
        raise OracleScaleError(
            f"C({gs.size},{m}) = {total} subsets exceeds enumeration budget {budget}"
        )
    return combinations(range(gs.size), m)


def enumerate_with_replacement(
    gs: GroundSet, m: int, budget: int = DEFAULT_ENUM_BUDGET
) -> Iterator[tuple[int, ...]]:
    """Yield every ordered length-m index sequence (N^m of them)."""
    total = gs.size**m
    if total > budget:
        raise OracleScaleError(
            f"{gs.size}^{m} = {total} sequences exceeds enumeration budget {budget}"
        )
    return product(range(gs.size), repeat=m)
