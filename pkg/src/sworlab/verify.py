"""Monte Carlo estimation of tail probabilities and domination checks.

Empirical tails come with exact (Clopper-Pearson style) binomial
confidence bounds; a bound is only flagged as violated when the lower
confidence bound at delta = 0.01 exceeds it, so noise cannot produce
false alarms against a proved inequality.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.stats import beta

from . import bounds as bank
from .bounds import BoundParams, Center
from .empirical_process import FunctionClass, expected_sup, simulate_suprema
from .errors import ConfigurationError, ContractError, OracleScaleError
from .ground_set import DEFAULT_ENUM_BUDGET, RngStream, SampleScheme

DEFAULT_DELTA = 0.01


def binomial_upper_ci(k: int, n: int, delta: float = DEFAULT_DELTA) -> float:
    """One-sided exact upper confidence bound for a binomial proportion.

    Smallest p whose lower tail probability of seeing <= k successes is
    delta; equals 1 when k = n.
    """
    if not 0 <= k <= n or n < 1:
        raise ConfigurationError(f"need 0 <= k <= n, n >= 1; got k={k}, n={n}")
    if k == n:
        return 1.0
    return float(beta.ppf(1.0 - delta, k + 1, n - k))


def binomial_lower_ci(k: int, n: int, delta: float = DEFAULT_DELTA) -> float:
    """One-sided exact lower confidence bound; equals 0 when k = 0."""
    if not 0 <= k <= n or n < 1:
        raise ConfigurationError(f"need 0 <= k <= n, n >= 1; got k={k}, n={n}")
    if k == 0:
        return 0.0
    return float(beta.ppf(delta, k, n - k + 1))


def default_eps_grid(m: int, sigma2: float, n_points: int = 20) -> np.ndarray:
    """Geometric grid spanning the sub-Gaussian shoulder into the deep tail."""
    lo = 0.05 * math.sqrt(max(m * sigma2, 1e-12))
    hi = 3.0 * m * sigma2 + 3.0
    return np.geomspace(lo, hi, n_points)


@dataclass
class TailCurve:
    """Empirical tail of Q' - center over an ascending eps grid."""

    eps_grid: np.ndarray
    tail_estimate: np.ndarray
    upper_ci: np.ndarray
    lower_ci: np.ndarray
    trials: int
    center: Center
    center_value: float
    center_std_error: float
    delta: float = DEFAULT_DELTA

    def __post_init__(self):
        if np.any(np.diff(self.eps_grid) <= 0):
            raise ConfigurationError("eps grid must be strictly ascending")
        if np.any(np.diff(self.tail_estimate) > 0):
            raise ConfigurationError("tail estimates must be nonincreasing in eps")
        if np.any(self.tail_estimate > self.upper_ci + 1e-15):
            raise ConfigurationError("tail estimate exceeds its upper CI")

    def to_dict(self) -> dict:
        return {
            "eps_grid": [float(e) for e in self.eps_grid],
            "tail_estimate": [float(p) for p in self.tail_estimate],
            "upper_ci": [float(p) for p in self.upper_ci],
            "lower_ci": [float(p) for p in self.lower_ci],
            "trials": self.trials,
            "center": self.center.name,
            "center_value": self.center_value,
            "center_std_error": self.center_std_error,
            "delta": self.delta,
        }


@dataclass
class DominationReport:
    """Outcome of comparing an empirical tail against an analytic bound."""

    theorem_tag: str
    violations: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "theorem_tag": self.theorem_tag,
            "passed": self.passed,
            "violations": [
                {"eps": e, "empirical_lower_ci": lo, "bound_value": b}
                for e, lo, b in self.violations
            ],
        }


def tail_curve_from_draws(
    draws: np.ndarray,
    eps_grid: np.ndarray,
    center: Center,
    center_value: float,
    center_std_error: float = 0.0,
    delta: float = DEFAULT_DELTA,
) -> TailCurve:
    """Build a TailCurve from precomputed supremum draws."""
    eps_grid = np.asarray(eps_grid, dtype=float)
    n = draws.size
    dev = draws - center_value
    ks = np.array([(dev >= e).sum() for e in eps_grid])
    return TailCurve(
        eps_grid=eps_grid,
        tail_estimate=ks / n,
        upper_ci=np.array([binomial_upper_ci(int(k), n, delta) for k in ks]),
        lower_ci=np.array([binomial_lower_ci(int(k), n, delta) for k in ks]),
        trials=n,
        center=center,
        center_value=center_value,
        center_std_error=center_std_error,
        delta=delta,
    )


def estimate_tail(
    fc: FunctionClass,
    scheme: SampleScheme,
    eps_grid,
    trials: int,
    center: Center,
    rng: RngStream,
    center_value: Optional[float] = None,
    center_std_error: float = 0.0,
    delta: float = DEFAULT_DELTA,
    center_trials: Optional[int] = None,
) -> TailCurve:
    """Estimate P{Q' - center >= eps} on the grid, with exact binomial CIs.

    The centering expectation is computed exactly when enumeration fits the
    budget, otherwise by an independent high-trial Monte Carlo run; pass
    center_value to reuse an estimate computed elsewhere.
    """
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    if center_value is None:
        center_scheme = (
            scheme
            if center is Center.AROUND_EQ_PRIME
            else SampleScheme(_flip_mode(scheme.mode), scheme.m)
        )
        try:
            stats = expected_sup(fc, center_scheme, method="exact")
        except OracleScaleError:
            stats = expected_sup(
                fc,
                center_scheme,
                method="monte_carlo",
                trials=center_trials or trials,
                rng=rng.substream(1_000_003),
            )
        center_value = (
            stats.mean_without
            if center_scheme.mode.name == "WITHOUT_REPLACEMENT"
            else stats.mean_with
        )
        center_std_error = stats.std_error
    draws = simulate_suprema(fc, scheme, trials, rng)
    return tail_curve_from_draws(
        draws, eps_grid, center, center_value, center_std_error, delta
    )


def _flip_mode(mode):
    from .ground_set import SampleMode

    return (
        SampleMode.WITH_REPLACEMENT
        if mode is SampleMode.WITHOUT_REPLACEMENT
        else SampleMode.WITHOUT_REPLACEMENT
    )


def check_domination(
    curve: TailCurve,
    theorem_tag: str,
    params: BoundParams,
    tail_fn: Optional[Callable] = None,
) -> DominationReport:
    """Compare an empirical tail curve against one theorem's bound.

    Refuses to compare when the curve's centering convention does not
    match the bound's.  A grid point is a violation when the exact lower
    confidence bound of the empirical tail exceeds the analytic bound.
    """
    expected_center = bank.BOUND_CENTERS.get(theorem_tag)
    if expected_center is None:
        raise ConfigurationError(f"unknown theorem tag {theorem_tag!r}")
    if curve.center is not expected_center:
        raise ContractError(
            f"{theorem_tag} bounds deviations around {expected_center.value}, "
            f"but the curve is centered around {curve.center.value}"
        )
    if tail_fn is None:
        tail_fn = bank.TAIL_BOUNDS[theorem_tag]
    report = DominationReport(theorem_tag=theorem_tag)
    for eps, lo in zip(curve.eps_grid, curve.lower_ci):
        p = BoundParams(
            N=params.N,
            m=params.m,
            sigma2=params.sigma2,
            eq_m=params.eq_m,
            eps=float(eps),
        )
        bound = tail_fn(p).value
        if lo > bound:
            report.violations.append((float(eps), float(lo), float(bound)))
    return report


def curves_to_csv(path, curve: TailCurve, params: BoundParams) -> None:
    """Dump per-grid-point estimates and all four analytic bounds."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(
            [
                "eps",
                "estimate",
                "upper_ci",
                "bound_thm1",
                "bound_thm2",
                "bound_ep",
                "bound_bousquet",
            ]
        )
        for eps, est, up in zip(curve.eps_grid, curve.tail_estimate, curve.upper_ci):
            p = BoundParams(
                N=params.N,
                m=params.m,
                sigma2=params.sigma2,
                eq_m=params.eq_m,
                eps=float(eps),
            )
            writer.writerow(
                [
                    float(eps),
                    float(est),
                    float(up),
                    bank.tail_subgaussian(p).value,
                    bank.tail_talagrand_swor(p).value,
                    bank.tail_elyaniv_pechyony(p).value,
                    bank.tail_bousquet(p).value,
                ]
            )
