"""rmtdiff: averages of characteristic polynomials of diffusing random matrices.

The package evaluates, at finite matrix size, averages of ratios and
products of characteristic polynomials over Gaussian matrix measures with an
external source -- both directly (Monte Carlo over matrix draws) and through
their low-dimensional parameter-space integral representations -- and
cross-verifies the two routes.
"""

__version__ = "0.1.0"

from .ensembles import (
    EnsembleSpec,
    RngStream,
    ou_reparametrize,
    sample,
    sample_crossover,
    sample_ginibre,
    sample_gue,
    sample_two_ginibre,
)
from .errors import DimensionError, DomainError, SingularityError
from .formulas import (
    MultiIndex,
    RatioResult,
    correlated_average,
    crossover_average,
    crossover_bump,
    crossover_bump_curve,
    crossover_finite_curve,
    duality_check,
    duality_rhs,
    forrester_rains_reduction,
    gue_ratio_reduction,
    pi_poly,
    product2_average,
    product2_reduced,
    ratio_average,
    theta_fun,
)
from .montecarlo import McEstimate, estimate, merge
from .verify import CheckReport, SuiteConfig, crosscheck, pde_residual_ratio, run_suite

__all__ = [
    "__version__",
    "EnsembleSpec",
    "RngStream",
    "ou_reparametrize",
    "sample",
    "sample_gue",
    "sample_ginibre",
    "sample_crossover",
    "sample_two_ginibre",
    "DimensionError",
    "DomainError",
    "SingularityError",
    "MultiIndex",
    "RatioResult",
    "pi_poly",
    "theta_fun",
    "ratio_average",
    "gue_ratio_reduction",
    "duality_rhs",
    "duality_check",
    "correlated_average",
    "forrester_rains_reduction",
    "product2_average",
    "product2_reduced",
    "crossover_average",
    "crossover_bump",
    "crossover_bump_curve",
    "crossover_finite_curve",
    "McEstimate",
    "estimate",
    "merge",
    "CheckReport",
    "SuiteConfig",
    "crosscheck",
    "pde_residual_ratio",
    "run_suite",
]
