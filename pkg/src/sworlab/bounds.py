"""The inequality bank: every tail / deviation bound as a pure formula.

Centering conventions matter and are part of each bound's contract:

* sub-Gaussian and the McDiarmid-style baseline bound deviations of Q'
  around E[Q'] (and hold for both tails);
* the Talagrand-type bound for sampling without replacement and its
  with-replacement Bousquet original bound deviations of Q' (resp. Q)
  around E[Q], upper tail only.

Tail probabilities are capped at 1.  Zero-variance degenerate classes are
deterministic, so their tail probability at eps > 0 is 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

from .errors import ConfigurationError


class BoundKind(Enum):
    TAIL_PROBABILITY = "tail_probability"
    DEVIATION_LEVEL = "deviation_level"


class Center(Enum):
    """Which expectation a deviation is measured from."""

    AROUND_EQ_PRIME = "E[Q'_m]"
    AROUND_EQ = "E[Q_m]"


#: centering convention per theorem tag, used by the verifier to refuse
#: comparisons against curves built around the wrong expectation
BOUND_CENTERS = {
    "subgaussian": Center.AROUND_EQ_PRIME,
    "elyaniv_pechyony": Center.AROUND_EQ_PRIME,
    "talagrand_swor": Center.AROUND_EQ,
    "bousquet": Center.AROUND_EQ,
}

#: tags whose tail bound also covers the lower tail E[Q'] - Q'
SYMMETRIC_TAGS = frozenset({"subgaussian", "elyaniv_pechyony"})


@dataclass(frozen=True)
class BoundParams:
    """Inputs shared by the bound formulas.

    eq_m is E[Q_m], accepted as data (exact or estimated upstream).
    """

    N: int
    m: int
    sigma2: float
    eq_m: float = 0.0
    t: float = 0.0
    eps: float = 0.0

    def __post_init__(self):
        if not 1 <= self.m <= self.N:
            raise ConfigurationError(f"need 1 <= m <= N, got m={self.m}, N={self.N}")
        if not 0.0 <= self.sigma2 <= 1.0:
            raise ConfigurationError(f"sigma2 must be in [0, 1], got {self.sigma2}")
        if self.t < 0 or self.eps < 0:
            raise ConfigurationError("t and eps must be nonnegative")

    @property
    def v(self) -> float:
        """Variance proxy m*sigma2 + 2*E[Q_m] of the Bennett-form bounds."""
        return self.m * self.sigma2 + 2.0 * self.eq_m


@dataclass(frozen=True)
class BoundValue:
    kind: BoundKind
    value: float
    theorem_tag: str

    def __post_init__(self):
        if self.kind is BoundKind.TAIL_PROBABILITY and not 0 <= self.value <= 1:
            raise ConfigurationError("tail probability out of [0, 1]")
        if self.kind is BoundKind.DEVIATION_LEVEL and self.value < 0:
            raise ConfigurationError("deviation level must be >= 0")


def h_fn(u: float) -> float:
    """h(u) = (1+u) log(1+u) - u, defined for u > -1."""
    if u <= -1:
        raise ConfigurationError(f"h(u) requires u > -1, got {u}")
    return (1.0 + u) * math.log1p(u) - u


def phi_fn(u: float) -> float:
    """phi(u) = e^u - u - 1."""
    return math.expm1(u) - u


def _tail(value: float, tag: str) -> BoundValue:
    return BoundValue(BoundKind.TAIL_PROBABILITY, min(1.0, value), tag)


def _deviation(value: float, tag: str) -> BoundValue:
    return BoundValue(BoundKind.DEVIATION_LEVEL, value, tag)


def tail_subgaussian(
    p: BoundParams, constant: float = 8.0, lower_tail: bool = False
) -> BoundValue:
    """Sub-Gaussian tail bound exp(-(N+2) eps^2 / (constant N^2 sigma2)).

    Symmetric: the same value bounds both Q' - E[Q'] and E[Q'] - Q'
    exceedances, so lower_tail only documents intent.  `constant` exists
    for corrupted-bound power checks and defaults to the true value 8.
    """
    del lower_tail
    if p.sigma2 == 0.0:
        return _tail(1.0 if p.eps == 0.0 else 0.0, "subgaussian")
    expo = -(p.N + 2) * p.eps**2 / (constant * p.N**2 * p.sigma2)
    return _tail(math.exp(expo), "subgaussian")


def tail_subgaussian_loose(p: BoundParams, constant: float = 8.0) -> BoundValue:
    """The looser form exp(-eps^2 / (8 N sigma2))."""
    if p.sigma2 == 0.0:
        return _tail(1.0 if p.eps == 0.0 else 0.0, "subgaussian_loose")
    return _tail(
        math.exp(-(p.eps**2) / (constant * p.N * p.sigma2)), "subgaussian_loose"
    )


def deviation_subgaussian(p: BoundParams) -> BoundValue:
    """Deviation of Q' above E[Q'] at confidence t: 2 sqrt(2 N sigma2 t)."""
    return _deviation(2.0 * math.sqrt(2.0 * p.N * p.sigma2 * p.t), "subgaussian")


def _tail_bennett(p: BoundParams, tag: str) -> BoundValue:
    v = p.v
    if v <= 0.0:
        return _tail(1.0 if p.eps == 0.0 else 0.0, tag)
    return _tail(math.exp(-v * h_fn(p.eps / v)), tag)


def _tail_bennett_loose(p: BoundParams, tag: str) -> BoundValue:
    v = p.v
    if v <= 0.0:
        return _tail(1.0 if p.eps == 0.0 else 0.0, tag)
    return _tail(math.exp(-(p.eps**2) / (2.0 * (v + p.eps / 3.0))), tag)


def tail_talagrand_swor(p: BoundParams) -> BoundValue:
    """Bennett-form tail of Q' above E[Q]: exp(-v h(eps/v)), v = m sigma2 + 2 E[Q].

    Upper tail only; there is no lower-tail counterpart for this bound.
    """
    return _tail_bennett(p, "talagrand_swor")


def tail_talagrand_swor_loose(p: BoundParams) -> BoundValue:
    """Bernstein-form relaxation exp(-eps^2 / (2(v + eps/3)))."""
    return _tail_bennett_loose(p, "talagrand_swor_loose")


def deviation_talagrand_swor(p: BoundParams) -> BoundValue:
    """Deviation of Q' above E[Q] (not E[Q']): sqrt(2 v t) + t/3."""
    return _deviation(math.sqrt(2.0 * p.v * p.t) + p.t / 3.0, "talagrand_swor")


def tail_bousquet(p: BoundParams) -> BoundValue:
    """Bousquet's with-replacement tail for Q; identical expression to the
    without-replacement Bennett form (that bound transfers verbatim)."""
    return _tail_bennett(p, "bousquet")


def tail_bousquet_loose(p: BoundParams) -> BoundValue:
    return _tail_bennett_loose(p, "bousquet_loose")


def deviation_bousquet(p: BoundParams) -> BoundValue:
    return _deviation(math.sqrt(2.0 * p.v * p.t) + p.t / 3.0, "bousquet")


def tail_elyaniv_pechyony(p: BoundParams, lower_tail: bool = False) -> BoundValue:
    """McDiarmid-style baseline, variance-free, symmetric:

    exp(-(eps^2 / 2m) ((N - 1/2)/(N - m)) (1 - 1/(2 max(m, N-m)))).
    """
    del lower_tail
    if p.m == p.N:
        # exhaustive sample: Q' is deterministic
        return _tail(1.0 if p.eps == 0.0 else 0.0, "elyaniv_pechyony")
    expo = (
        -(p.eps**2 / (2.0 * p.m))
        * ((p.N - 0.5) / (p.N - p.m))
        * (1.0 - 1.0 / (2.0 * max(p.m, p.N - p.m)))
    )
    return _tail(math.exp(expo), "elyaniv_pechyony")


def gap_bound(N: int, m: int) -> float:
    """Upper bound 2 m^3 / N on E[Q_m] - E[Q'_m]."""
    if not 1 <= m <= N:
        raise ConfigurationError(f"need 1 <= m <= N, got m={m}, N={N}")
    return 2.0 * m**3 / N


TAIL_BOUNDS = {
    "subgaussian": tail_subgaussian,
    "talagrand_swor": tail_talagrand_swor,
    "bousquet": tail_bousquet,
    "elyaniv_pechyony": tail_elyaniv_pechyony,
}

DEVIATION_BOUNDS = {
    "subgaussian": deviation_subgaussian,
    "talagrand_swor": deviation_talagrand_swor,
    "bousquet": deviation_bousquet,
}


def compare_exponents(
    N: int, m: int, sigma2: float, eps: float, eq_m: float = 0.0
) -> dict:
    """Compare the tail exponents of the three inequalities at one eps.

    Reports, per tag, the exponent (log of the tail bound); the tightest
    bound is the one with the most negative exponent.  The comparison form
    of the sub-Gaussian exponent, -eps^2/(8 N sigma2), is reported
    alongside the exact one.  The Bennett exponent uses eq_m as E[Q_m].
    """
    p = BoundParams(N=N, m=m, sigma2=sigma2, eq_m=eq_m, eps=eps)
    exponents = {}
    if sigma2 > 0.0:
        exponents["subgaussian"] = -(N + 2) * eps**2 / (8.0 * N**2 * sigma2)
        exponents["subgaussian_loose"] = -(eps**2) / (8.0 * N * sigma2)
    else:
        exponents["subgaussian"] = -math.inf
        exponents["subgaussian_loose"] = -math.inf
    v = p.v
    exponents["talagrand_swor"] = -v * h_fn(eps / v) if v > 0 else -math.inf
    if m < N:
        exponents["elyaniv_pechyony"] = (
            -(eps**2 / (2.0 * m))
            * ((N - 0.5) / (N - m))
            * (1.0 - 1.0 / (2.0 * max(m, N - m)))
        )
        exponents["elyaniv_pechyony_uncorrected"] = -(eps**2 / (2.0 * m)) * (
            (N - 0.5) / (N - m)
        )
    else:
        exponents["elyaniv_pechyony"] = -math.inf
        exponents["elyaniv_pechyony_uncorrected"] = -math.inf

    compared = {k: exponents[k] for k in ("subgaussian", "talagrand_swor", "elyaniv_pechyony")}
    best = min(compared.values())
    tightest = sorted(k for k, val in compared.items() if val == best)
    return {
        "exponents": exponents,
        "tightest": tightest[0],
        "ties": tightest[1:],
        "params": {"N": N, "m": m, "sigma2": sigma2, "eps": eps, "eq_m": eq_m},
    }
