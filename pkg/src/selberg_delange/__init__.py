"""Distributions of additive functions under multiplicative weights.

Two complementary engines over the same objects:

* exact: sieve-scale tables of f(n) for n <= x, giving partial sums,
  moment generating functions, probability mass functions, and samples
  of g(N) where P(N = n) is proportional to a multiplicative weight.
* asymptotic: truncated compensated Euler products, giving the
  limiting constant lambda0, the limiting function psi(z), central
  limit normalization, and precise large-deviation predictions.

The two sides meet in the normalized residual psi_x(z) - psi(z), whose
decay is the convergence statement the test suite verifies.
"""

from .errors import (
    DegenerateSpecError,
    DivergentLocalFactorError,
    DomainError,
    PoleError,
    SpecGrammarError,
)
from .euler import (
    AdmissibilityReport,
    EulerProductResult,
    check_admissibility_pp,
    g_compensated,
    lambda0,
    local_factor,
    psi,
)
from .exact import (
    DistributionTable,
    WeightTable,
    additive_value_table,
    build_weight_table,
    compensated_cumsum,
    compensated_sum,
    distribution_to_csv,
    mgf_exact,
    mod_poisson_residual,
    multiplicative_value_table,
    partial_sum,
    pmf,
    sample,
    sums_to_csv,
    twisted_sum,
)
from .funcs import (
    BIG_OMEGA,
    FULL_PLANE,
    OMEGA,
    AdditiveSpec,
    GrowthBound,
    MultiplicativeSpec,
    StripDomain,
    eval_additive,
    eval_multiplicative,
    euler_phi_over_n,
    geometric_B,
    parse_additive,
    parse_multiplicative,
    perturbed,
    tabulated_additive,
    tabulated_multiplicative,
    tau_rho,
    theta_omega,
    twist,
    unit,
)
from .sieve import (
    Factorization,
    SieveTable,
    big_omega,
    build_sieve,
    cached_sieve,
    factor,
    load_sieve,
    omega,
    prime_array,
    primes_up_to,
    save_sieve,
)
from .special import cexpm1, clog1p, cpow, gamma, zeta
from .stats import (
    CltReport,
    LdpPrediction,
    clt_report,
    eta,
    eta_prime,
    eta_second,
    eta_star,
    ldp_predict,
    normal_cdf,
    psi_prime_at_zero,
)

__version__ = "0.1.0"

__all__ = [
    "AdditiveSpec",
    "AdmissibilityReport",
    "BIG_OMEGA",
    "CltReport",
    "DegenerateSpecError",
    "DistributionTable",
    "DivergentLocalFactorError",
    "DomainError",
    "EulerProductResult",
    "FULL_PLANE",
    "Factorization",
    "GrowthBound",
    "LdpPrediction",
    "MultiplicativeSpec",
    "OMEGA",
    "PoleError",
    "SieveTable",
    "SpecGrammarError",
    "StripDomain",
    "WeightTable",
    "additive_value_table",
    "big_omega",
    "build_sieve",
    "build_weight_table",
    "cached_sieve",
    "cexpm1",
    "check_admissibility_pp",
    "clog1p",
    "clt_report",
    "compensated_cumsum",
    "compensated_sum",
    "cpow",
    "distribution_to_csv",
    "eta",
    "eta_prime",
    "eta_second",
    "eta_star",
    "euler_phi_over_n",
    "eval_additive",
    "eval_multiplicative",
    "factor",
    "g_compensated",
    "gamma",
    "geometric_B",
    "lambda0",
    "ldp_predict",
    "load_sieve",
    "local_factor",
    "mgf_exact",
    "mod_poisson_residual",
    "multiplicative_value_table",
    "normal_cdf",
    "omega",
    "parse_additive",
    "parse_multiplicative",
    "partial_sum",
    "perturbed",
    "pmf",
    "prime_array",
    "primes_up_to",
    "psi",
    "psi_prime_at_zero",
    "sample",
    "save_sieve",
    "sums_to_csv",
    "tabulated_additive",
    "tabulated_multiplicative",
    "tau_rho",
    "theta_omega",
    "twist",
    "twisted_sum",
    "unit",
    "zeta",
]
