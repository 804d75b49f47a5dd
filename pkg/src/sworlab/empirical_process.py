"""Finite function classes and suprema of their empirical processes.

A class is an M x N table: row j holds the values of f_j on the population.
Centered classes (row means zero, entries in [-1, 1]) are the objects the
concentration inequalities speak about.  Q denotes the supremum over rows
of the sum of values on a sample; the with-replacement and
without-replacement variants differ only in how the sample is drawn.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations_with_replacement
from typing import Optional

import numpy as np

from .errors import ConfigurationError, OracleScaleError
from .ground_set import (
    DEFAULT_ENUM_BUDGET,
    GroundSet,
    RngStream,
    SampleMode,
    SampleScheme,
    batch_sample_without_replacement,
    enumerate_without_replacement,
)

CENTER_TOL = 1e-12


@dataclass(frozen=True)
class FunctionClass:
    """M functions on a population of N points, stored as an (M, N) table."""

    values: np.ndarray
    centered: bool = False

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.ndim != 2 or v.shape[0] < 1 or v.shape[1] < 1:
            raise ConfigurationError("values must be a nonempty 2-D table")
        if not np.all(np.isfinite(v)):
            raise ConfigurationError("values must be finite")
        object.__setattr__(self, "values", v)
        if self.centered:
            if np.max(np.abs(v.mean(axis=1))) > CENTER_TOL:
                raise ConfigurationError("centered class has a nonzero row mean")
            if np.max(np.abs(v)) > 1 + CENTER_TOL:
                raise ConfigurationError("centered class has entries outside [-1, 1]")

    @property
    def n_functions(self) -> int:
        return self.values.shape[0]

    @property
    def n_points(self) -> int:
        return self.values.shape[1]

    @property
    def ground_set(self) -> GroundSet:
        return GroundSet(self.n_points)

    @classmethod
    def from_csv(cls, path, centered: bool = False) -> "FunctionClass":
        """Load a table from CSV: rows = functions, columns = points.

        A first line that fails to parse as numbers is treated as a header.
        """
        try:
            raw = np.loadtxt(path, delimiter=",", ndmin=2)
        except ValueError:
            raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(raw, centered=centered)


@dataclass(frozen=True)
class SupremumStats:
    """Exact or Monte Carlo estimates of the expected suprema and variance."""

    mean_with: Optional[float]
    mean_without: Optional[float]
    variance_sigma2: float
    exact: bool
    trials: int
    std_error: float


def center_class(raw: np.ndarray) -> FunctionClass:
    """Center each row against the uniform law and rescale into [-1, 1].

    Rows are shifted to zero mean and divided by max(1, max |entry|) after
    the shift, so the range condition holds without inflating small rows.
    All-constant rows become identically zero.
    """
    raw = np.asarray(raw, dtype=float)
    if raw.ndim == 1:
        raw = raw[None, :]
    if not np.all(np.isfinite(raw)):
        raise ConfigurationError("values must be finite")
    shifted = raw - raw.mean(axis=1, keepdims=True)
    scale = np.maximum(1.0, np.abs(shifted).max(axis=1, keepdims=True))
    vals = shifted / scale
    # one exact re-centering pass to land within the rounding-scale tolerance
    vals = vals - vals.mean(axis=1, keepdims=True)
    return FunctionClass(vals, centered=True)


def sup_process(fc: FunctionClass, sample) -> float:
    """sup over rows of the sum of values on the sample (empty sample -> 0)."""
    idx = np.asarray(sample, dtype=int)
    if idx.size == 0:
        return 0.0
    return float(fc.values[:, idx].sum(axis=1).max())


def class_variance(fc: FunctionClass) -> float:
    """sigma^2: max over rows of the population mean of squared values."""
    if not fc.centered:
        raise ConfigurationError("class variance is defined for centered classes")
    return float((fc.values**2).mean(axis=1).max())


def _exact_mean_without(fc: FunctionClass, m: int, budget: int) -> float:
    gs = fc.ground_set
    subsets = np.array(list(enumerate_without_replacement(gs, m, budget=budget)))
    sums = fc.values[:, subsets].sum(axis=2)  # (M, n_subsets)
    return float(sums.max(axis=0).mean())


def _exact_mean_with(fc: FunctionClass, m: int, budget: int) -> float:
    # Sum over ordered sequences, grouped by multiset: a multiset with
    # counts (k_1..k_N) covers m!/prod(k_i!) sequences, and the supremum
    # depends on the sequence only through its counts.
    n = fc.n_points
    n_multisets = math.comb(n + m - 1, m)
    if n_multisets > budget:
        raise OracleScaleError(
            f"C({n + m - 1},{m}) = {n_multisets} multisets exceeds budget {budget}"
        )
    log_n = math.log(n)
    total = 0.0
    fact_m = math.factorial(m)
    for combo in combinations_with_replacement(range(n), m):
        idx = np.asarray(combo)
        sup = fc.values[:, idx].sum(axis=1).max()
        weight = fact_m
        prev, run = combo[0], 0
        denom = 1
        for c in combo:
            if c == prev:
                run += 1
            else:
                denom *= math.factorial(run)
                prev, run = c, 1
        denom *= math.factorial(run)
        total += (weight / denom) * math.exp(-m * log_n) * sup
    return float(total)


def simulate_suprema(
    fc: FunctionClass,
    scheme: SampleScheme,
    trials: int,
    rng: RngStream,
    block: int = 10_000,
) -> np.ndarray:
    """Draw `trials` independent suprema, vectorized in fixed-size blocks.

    Block b uses rng.substream(b), so the result is bit-identical however
    the blocks are scheduled.
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    scheme.validate_for(fc.ground_set)
    n, m = fc.n_points, scheme.m
    out = np.empty(trials)
    pos = 0
    b = 0
    while pos < trials:
        size = min(block, trials - pos)
        gen = rng.substream(b).generator()
        if scheme.mode is SampleMode.WITH_REPLACEMENT:
            idx = gen.integers(0, n, size=(size, m))
        else:
            idx = batch_sample_without_replacement(n, m, size, gen)
        sums = fc.values[:, idx].sum(axis=2)  # (M, size)
        out[pos : pos + size] = sums.max(axis=0)
        pos += size
        b += 1
    return out


def expected_sup(
    fc: FunctionClass,
    scheme: SampleScheme,
    method: str = "exact",
    trials: int = 0,
    rng: Optional[RngStream] = None,
    budget: int = DEFAULT_ENUM_BUDGET,
) -> SupremumStats:
    """E[Q] for the given sampling scheme, exact or by Monte Carlo.

    Exact mode enumerates subsets (without replacement) or multisets with
    multinomial weights (with replacement); Monte Carlo mode reports the
    sample mean with std_error = sample std / sqrt(trials).
    """
    if not fc.centered:
        raise ConfigurationError("expected_sup requires a centered class")
    scheme.validate_for(fc.ground_set)
    sigma2 = class_variance(fc)
    without = scheme.mode is SampleMode.WITHOUT_REPLACEMENT
    if method == "exact":
        if without:
            mean = _exact_mean_without(fc, scheme.m, budget)
        else:
            mean = _exact_mean_with(fc, scheme.m, budget)
        return SupremumStats(
            mean_with=None if without else mean,
            mean_without=mean if without else None,
            variance_sigma2=sigma2,
            exact=True,
            trials=0,
            std_error=0.0,
        )
    if method == "monte_carlo":
        if rng is None or trials < 1:
            raise ConfigurationError("monte_carlo mode needs rng and trials >= 1")
        draws = simulate_suprema(fc, scheme, trials, rng)
        mean = float(draws.mean())
        se = float(draws.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        return SupremumStats(
            mean_with=None if without else mean,
            mean_without=mean if without else None,
            variance_sigma2=sigma2,
            exact=False,
            trials=trials,
            std_error=se,
        )
    raise ConfigurationError(f"unknown method {method!r}")
