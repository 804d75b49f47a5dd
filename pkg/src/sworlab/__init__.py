"""Concentration inequalities for suprema of empirical processes under
sampling without replacement, with Monte Carlo verification harnesses,
transductive ERM bounds, localized complexities, and kernel tailsum
bounds."""

from .bounds import (
    BoundKind,
    BoundParams,
    BoundValue,
    Center,
    compare_exponents,
    deviation_bousquet,
    deviation_subgaussian,
    deviation_talagrand_swor,
    gap_bound,
    h_fn,
    phi_fn,
    tail_bousquet,
    tail_elyaniv_pechyony,
    tail_subgaussian,
    tail_talagrand_swor,
)
from .empirical_process import (
    FunctionClass,
    SupremumStats,
    center_class,
    class_variance,
    expected_sup,
    simulate_suprema,
    sup_process,
)
from .ground_set import (
    GroundSet,
    RngStream,
    SampleMode,
    SampleScheme,
    draw_sample,
    enumerate_with_replacement,
    enumerate_without_replacement,
)
from .kernels import EigenSpectrum, KernelSpec, eigen_spectrum, gram_matrix, tailsum_bound
from .localization import (
    BernsteinConstant,
    ExcessLossClass,
    SubRootBound,
    build_excess_class,
    compute_B,
    estimate_modulus,
    excess_bound_cor10,
    excess_bound_cor11,
    excess_bound_thm8,
    excess_bound_thm9,
    fit_subroot,
    fixed_point,
    stability_bound_appD,
)
from .transductive import (
    ErmOutcome,
    SplitRisks,
    TransductiveProblem,
    erm,
    gen_bound_thm5,
    gen_bound_thm6,
    sigma2_H,
    split_and_risks,
)
from .verify import (
    DominationReport,
    TailCurve,
    binomial_lower_ci,
    binomial_upper_ci,
    check_domination,
    default_eps_grid,
    estimate_tail,
)

__version__ = "0.1.0"
