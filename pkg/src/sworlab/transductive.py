"""Transductive ERM over a finite hypothesis table.

The learner sees losses of every hypothesis on every population point as
an H x N table with entries in [0, 1].  A uniform without-replacement
split of size m defines training risk, test risk, and the (nonrandom)
overall risk, linked by the exact identity N L_N = m L_m + u L_u.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .empirical_process import FunctionClass, expected_sup
from .errors import ConfigurationError
from .ground_set import (
    DEFAULT_ENUM_BUDGET,
    GroundSet,
    RngStream,
    SampleMode,
    SampleScheme,
    draw_sample,
)


@dataclass(frozen=True)
class TransductiveProblem:
    """Losses of H hypotheses on a fixed population of N points."""

    loss_table: np.ndarray

    def __post_init__(self):
        lt = np.asarray(self.loss_table, dtype=float)
        if lt.ndim != 2 or lt.shape[0] < 1 or lt.shape[1] < 1:
            raise ConfigurationError("loss table must be a nonempty 2-D array")
        if not np.all(np.isfinite(lt)):
            raise ConfigurationError("loss table must be finite")
        if lt.min() < 0.0 or lt.max() > 1.0:
            raise ConfigurationError("losses must lie in [0, 1]")
        object.__setattr__(self, "loss_table", lt)

    @property
    def n_hypotheses(self) -> int:
        return self.loss_table.shape[0]

    @property
    def N(self) -> int:
        return self.loss_table.shape[1]

    @property
    def overall_risk(self) -> np.ndarray:
        """L_N per hypothesis: population mean of each loss row."""
        return self.loss_table.mean(axis=1)

    @classmethod
    def from_csv(cls, path) -> "TransductiveProblem":
        try:
            raw = np.loadtxt(path, delimiter=",", ndmin=2)
        except ValueError:
            raw = np.loadtxt(path, delimiter=",", skiprows=1, ndmin=2)
        return cls(raw)

    def centered_class(self) -> FunctionClass:
        """The associated centered class f_h(X) = L_N(h) - loss_h(X).

        Its normalized supremum process is sup_h (L_N(h) - train risk),
        so expected suprema of the table problem reduce to E[Q]/m.
        """
        vals = self.overall_risk[:, None] - self.loss_table
        return FunctionClass(vals, centered=True)


@dataclass(frozen=True)
class SplitRisks:
    train_indices: np.ndarray
    test_indices: np.ndarray
    train_risk: np.ndarray
    test_risk: np.ndarray
    overall_risk: np.ndarray


@dataclass(frozen=True)
class ErmOutcome:
    h_hat_m: int
    h_star_u: int
    h_star_N: int
    excess_risk: float


def split_and_risks(tp: TransductiveProblem, m: int, rng: RngStream) -> SplitRisks:
    """Uniform without-replacement split and the three risk vectors."""
    if not 1 <= m < tp.N:
        raise ConfigurationError(f"need 1 <= m < N for a nonempty test set, got m={m}")
    gs = GroundSet(tp.N)
    train = np.sort(draw_sample(gs, SampleScheme(SampleMode.WITHOUT_REPLACEMENT, m), rng))
    mask = np.zeros(tp.N, dtype=bool)
    mask[train] = True
    test = np.flatnonzero(~mask)
    return risks_for_split(tp, train, test)


def risks_for_split(
    tp: TransductiveProblem, train: np.ndarray, test: np.ndarray
) -> SplitRisks:
    return SplitRisks(
        train_indices=np.asarray(train),
        test_indices=np.asarray(test),
        train_risk=tp.loss_table[:, train].mean(axis=1),
        test_risk=tp.loss_table[:, test].mean(axis=1),
        overall_risk=tp.overall_risk,
    )


def erm(tp: TransductiveProblem, sr: SplitRisks) -> ErmOutcome:
    """Argmins of the three risks; ties broken by lowest hypothesis index."""
    h_hat_m = int(np.argmin(sr.train_risk))
    h_star_u = int(np.argmin(sr.test_risk))
    h_star_N = int(np.argmin(sr.overall_risk))
    return ErmOutcome(
        h_hat_m=h_hat_m,
        h_star_u=h_star_u,
        h_star_N=h_star_N,
        excess_risk=float(sr.test_risk[h_hat_m] - sr.test_risk[h_star_u]),
    )


def sigma2_H(tp: TransductiveProblem) -> float:
    """Largest population variance of a loss row; always <= 1/4."""
    ln = tp.overall_risk
    return float(((tp.loss_table - ln[:, None]) ** 2).mean(axis=1).max())


def exact_sup_expectation(
    tp: TransductiveProblem, m: int, budget: int = DEFAULT_ENUM_BUDGET
) -> float:
    """E[sup_h (L_N(h) - train risk)] exactly, over all C(N, m) splits."""
    fc = tp.centered_class()
    stats = expected_sup(
        fc, SampleScheme(SampleMode.WITHOUT_REPLACEMENT, m), method="exact", budget=budget
    )
    return stats.mean_without / m


def exact_with_replacement_expectation(
    tp: TransductiveProblem, m: int, budget: int = DEFAULT_ENUM_BUDGET
) -> float:
    """E_m = E[sup_h (L_N(h) - mean loss on m with-replacement draws)]."""
    fc = tp.centered_class()
    stats = expected_sup(
        fc, SampleScheme(SampleMode.WITH_REPLACEMENT, m), method="exact", budget=budget
    )
    return stats.mean_with / m


def mc_sup_expectation(
    tp: TransductiveProblem,
    m: int,
    mode: SampleMode,
    trials: int,
    rng: RngStream,
) -> tuple[float, float]:
    """Monte Carlo (value, std_error) for the normalized expected supremum."""
    fc = tp.centered_class()
    stats = expected_sup(
        fc, SampleScheme(mode, m), method="monte_carlo", trials=trials, rng=rng
    )
    mean = stats.mean_without if mode is SampleMode.WITHOUT_REPLACEMENT else stats.mean_with
    return mean / m, stats.std_error / m


def gen_bound_thm5(
    tp: TransductiveProblem, m: int, t: float, sup_expectation: float
) -> float:
    """Uniform bound on L_N(h) - train risk at confidence t:

    sup_expectation + 2 sqrt(2 (N/m^2) sigma2_H t).
    """
    s2 = sigma2_H(tp)
    return sup_expectation + 2.0 * math.sqrt(2.0 * (tp.N / m**2) * s2 * t)


def gen_bound_thm6(tp: TransductiveProblem, m: int, t: float, e_m: float) -> float:
    """With-replacement flavor: 2 E_m + sqrt(2 sigma2_H t / m) + 4t/(3m)."""
    s2 = sigma2_H(tp)
    return 2.0 * e_m + math.sqrt(2.0 * s2 * t / m) + 4.0 * t / (3.0 * m)
