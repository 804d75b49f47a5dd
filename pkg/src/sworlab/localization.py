"""Localized complexity: excess loss classes, the variance-to-mean
constant B, sub-root majorants with their fixed points, and the localized
excess-risk bound formulas.

The modulus of continuity is estimated on variance slices
{f : E f^2 <= r} of the excess loss class and majorized within the c*sqrt(r)
family, whose fixed point is c^2 exactly.  Upper-confidence fitting
(estimate + 2 standard errors) keeps the majorant statistically
conservative when the modulus is only estimated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .empirical_process import FunctionClass
from .errors import BernsteinConditionError, ConfigurationError
from .ground_set import (
    DEFAULT_ENUM_BUDGET,
    GroundSet,
    RngStream,
    SampleMode,
    SampleScheme,
    batch_sample_without_replacement,
    enumerate_without_replacement,
)
from .transductive import TransductiveProblem

ZERO_TOL = 1e-12


@dataclass(frozen=True)
class ExcessLossClass:
    """Rows f_h = loss_h - loss_{h*}, where h* minimizes the overall risk."""

    base: TransductiveProblem
    star_index: int
    rows: np.ndarray

    @property
    def means(self) -> np.ndarray:
        """E f per row (all >= 0 by optimality of h*)."""
        return self.rows.mean(axis=1)

    @property
    def second_moments(self) -> np.ndarray:
        """E f^2 per row."""
        return (self.rows**2).mean(axis=1)


@dataclass(frozen=True)
class BernsteinConstant:
    B: float
    witness: int
    satisfied: bool
    violator: Optional[int] = None


@dataclass(frozen=True)
class SubRootBound:
    """A certified majorant psi(r) = c*sqrt(r) with fixed point r* = c^2."""

    c: float
    r_star: float
    grid: list  # (r, psi_hat, std_error) triples
    flavor: SampleMode


def build_excess_class(tp: TransductiveProblem) -> ExcessLossClass:
    """Subtract the overall-risk minimizer's loss row (index tie-break)."""
    star = int(np.argmin(tp.overall_risk))
    rows = tp.loss_table - tp.loss_table[star]
    return ExcessLossClass(base=tp, star_index=star, rows=rows)


def compute_B(ec: ExcessLossClass) -> BernsteinConstant:
    """Smallest B with E f^2 <= B E f across the class, computed exactly.

    A row with E f = 0 but E f^2 > 0 (a distinct hypothesis tied in
    overall risk) admits no finite B: satisfied is False and the violating
    hypothesis is named.
    """
    means = ec.means
    seconds = ec.second_moments
    zero_mean = means <= ZERO_TOL
    violators = np.flatnonzero(zero_mean & (seconds > ZERO_TOL))
    if violators.size:
        return BernsteinConstant(
            B=math.inf, witness=int(violators[0]), satisfied=False,
            violator=int(violators[0]),
        )
    positive = ~zero_mean
    if not positive.any():
        return BernsteinConstant(B=1.0, witness=ec.star_index, satisfied=True)
    ratios = seconds[positive] / means[positive]
    local = int(np.argmax(ratios))
    witness = int(np.flatnonzero(positive)[local])
    return BernsteinConstant(B=float(ratios[local]), witness=witness, satisfied=True)


def require_bernstein(bc: BernsteinConstant) -> float:
    if not bc.satisfied:
        raise BernsteinConditionError(
            f"hypothesis {bc.violator} has zero mean excess loss but positive "
            "second moment; no finite variance-to-mean constant exists"
        )
    return bc.B


def _as_B(B: Union[float, BernsteinConstant]) -> float:
    if isinstance(B, BernsteinConstant):
        return require_bernstein(B)
    if B <= 0 or not math.isfinite(B):
        raise ConfigurationError(f"B must be a positive finite number, got {B}")
    return B


def slice_indices(ec: ExcessLossClass, r: float) -> np.ndarray:
    """Rows of the variance slice {f : E f^2 <= r} (always contains h*)."""
    return np.flatnonzero(ec.second_moments <= r + ZERO_TOL)


def estimate_modulus(
    ec: ExcessLossClass,
    r: float,
    m: int,
    flavor: SampleMode,
    trials: int,
    rng: RngStream,
    B: Union[float, BernsteinConstant] = 1.0,
    method: str = "monte_carlo",
    budget: int = DEFAULT_ENUM_BUDGET,
) -> tuple[float, float]:
    """(psi_hat(r), std_error): B times the expected slice supremum of
    E f - (empirical mean of f over the size-m sample).

    method="exact" enumerates all samples (std_error 0); the Monte Carlo
    path averages per-trial slice suprema over seeded blocks.
    """
    if r <= 0:
        raise ConfigurationError("slice radius r must be positive")
    b_val = _as_B(B)
    idx = slice_indices(ec, r)
    sub = ec.rows[idx]
    means = sub.mean(axis=1)
    if np.all(np.abs(sub) <= ZERO_TOL):
        return 0.0, 0.0
    n = ec.rows.shape[1]
    # per-sample statistic: sup over slice rows of mean of g = Ef - f;
    # g rows have zero mean but can reach into (1, 2], so no centered flag
    g = means[:, None] - sub
    gfc = FunctionClass(g, centered=False)
    if method == "exact":
        if flavor is SampleMode.WITHOUT_REPLACEMENT:
            subsets = np.array(
                list(enumerate_without_replacement(GroundSet(n), m, budget=budget))
            )
            sums = gfc.values[:, subsets].sum(axis=2)
            val = float(sums.max(axis=0).mean()) / m
        else:
            from .empirical_process import _exact_mean_with

            val = _exact_mean_with(gfc, m, budget) / m
        return b_val * val, 0.0
    if method != "monte_carlo":
        raise ConfigurationError(f"unknown method {method!r}")
    if trials < 1:
        raise ConfigurationError("trials must be >= 1")
    from .empirical_process import simulate_suprema

    draws = simulate_suprema(gfc, SampleScheme(flavor, m), trials, rng) / m
    se = float(draws.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    return b_val * float(draws.mean()), b_val * se


def default_r_grid(ec: ExcessLossClass, n_points: int = 12) -> np.ndarray:
    """Geometric grid spanning the nonzero second moments of the class."""
    seconds = ec.second_moments
    nonzero = seconds[seconds > ZERO_TOL]
    if nonzero.size == 0:
        return np.array([1.0])
    return np.geomspace(nonzero.min() / 2.0, seconds.max() * 2.0, n_points)


def fit_subroot(grid_evals, flavor: SampleMode) -> SubRootBound:
    """Fit the smallest c with c*sqrt(r) >= psi_hat(r) + 2 se on the grid."""
    grid = [(float(r), float(p), float(se)) for r, p, se in grid_evals]
    if not grid:
        raise ConfigurationError("empty modulus grid")
    c = 0.0
    for r, p, se in grid:
        if r <= 0:
            raise ConfigurationError("grid radii must be positive")
        c = max(c, (p + 2.0 * se) / math.sqrt(r))
    return SubRootBound(c=c, r_star=c * c, grid=grid, flavor=flavor)


def fixed_point(
    psi: Callable[[float], float],
    r_lo: float,
    r_hi: float,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> float:
    """Unique positive fixed point of a sub-root psi, by bisection.

    psi(r) - r crosses zero exactly once on (0, inf) because psi(r)/r is
    strictly decreasing; the bracket [r_lo, r_hi] must exhibit the sign
    change.
    """
    g_lo = psi(r_lo) - r_lo
    g_hi = psi(r_hi) - r_hi
    if g_lo < 0 or g_hi > 0:
        raise ConfigurationError(
            f"no sign change: psi(r)-r is {g_lo:.3g} at r_lo and {g_hi:.3g} at r_hi"
        )
    lo, hi = r_lo, r_hi
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        g = psi(mid) - mid
        if abs(g) <= tol:
            return mid
        if g > 0:
            lo = mid
        else:
            hi = mid
    mid = 0.5 * (lo + hi)
    if abs(psi(mid) - mid) > tol:
        raise ConfigurationError(f"bisection stalled at residual {psi(mid) - mid:.3g}")
    return mid


def excess_bound_thm8(
    B: Union[float, BernsteinConstant], r_star: float, N: int, m: int, t: float
) -> float:
    """51 r*/B + 17 B t (N/m^2); without-replacement localized bound."""
    b = _as_B(B)
    return 51.0 * r_star / b + 17.0 * b * t * (N / m**2)


def excess_bound_thm9(
    B: Union[float, BernsteinConstant], r_star: float, m: int, t: float
) -> float:
    """901 r*/B + t (16 + 25 B)/(3 m); with-replacement-flavor bound."""
    b = _as_B(B)
    return 901.0 * r_star / b + t * (16.0 + 25.0 * b) / (3.0 * m)


def excess_bound_cor10(
    B: Union[float, BernsteinConstant],
    r_star_m: float,
    r_star_u: float,
    N: int,
    m: int,
    u: int,
    t: float,
) -> float:
    """Test-excess-risk bound at confidence 2e^{-t}, from the 51/17 pair."""
    b = _as_B(B)
    return (N / u) * (51.0 * r_star_m / b + 17.0 * b * t * N / m**2) + (N / m) * (
        51.0 * r_star_u / b + 17.0 * b * t * N / u**2
    )


def excess_bound_cor11(
    B: Union[float, BernsteinConstant],
    r_star_m: float,
    r_star_u: float,
    N: int,
    m: int,
    u: int,
    t: float,
    K: float = 1.0,
) -> float:
    """901/(16+25B) analogue; K is stated but unquantified in the source
    result, exposed as an explicit parameter defaulting to 1."""
    b = _as_B(B)
    return (N / u) * (
        901.0 * K * r_star_m / b + t * (16.0 + 25.0 * b) / (3.0 * m)
    ) + (N / m) * (901.0 * K * r_star_u / b + t * (16.0 + 25.0 * b) / (3.0 * u))


def stability_bound_appD(
    B: Union[float, BernsteinConstant],
    K: float,
    r_star_m: float,
    r_star_u: float,
    N: int,
    m: int,
    u: int,
    t: float,
) -> float:
    """|L_N(erm) - L_N(test minimizer)| bound, any K > 1:

    2 K (r*_m + r*_u)/B + 16 K B t N (1/m^2 + 1/u^2).
    """
    if K <= 1.0:
        raise ConfigurationError(f"K must exceed 1, got {K}")
    b = _as_B(B)
    return 2.0 * K * (r_star_m + r_star_u) / b + 16.0 * K * b * t * N * (
        1.0 / m**2 + 1.0 / u**2
    )


DEFAULT_APPD_K = 1.0001
