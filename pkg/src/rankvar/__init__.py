"""rankvar: transformed rank correlations, Kendall's tau, and the
asymptotic variances of their canonical estimators.

Closed-form analytics are cross-validated against seeded Monte Carlo;
see the README for the CLI and the acceptance suite.
"""

from .analytics import (AttainerToken, MixtureMoments, Preference,
                        VarianceEnvelope, beta_clayton, beta_closed_form,
                        envelope_frechet, kappa_discrete, kappa_frechet,
                        optimal_shift_analytic, optimal_shifted_sigma2,
                        prefer, sigma2_beta, sigma2_closed_form,
                        sigma2_discrete, sigma2_frechet, sigma2_from_covariances,
                        sigma2_nvm, sigma2_nvm_from_var_x2, sigma2_tau_analytic,
                        squared_copula, tau_closed_form, tau_frechet)
from .bvn import bvn_cdf
from .copulas import (Copula, FrechetWeights, ShuffleSpec, clayton,
                      comonotone, counter_monotone, frechet, gaussian,
                      independence, parse_copula, sample_csv, shuffle_of_m,
                      student_t)
from .distributions import (ConcordanceInducing, DiscreteSymmetricSpec,
                            SupportKind, make_builtin, make_discrete,
                            make_mixture_point_uniform, parse_distribution,
                            shifted)
from .errors import (CapabilityError, ConstraintError, ContractError,
                     ParseError, RankvarError)
from .estimation import (EstimationResult, combine, confidence_interval,
                         estimate_kappa, estimate_optimal_shift, estimate_tau,
                         estimate_tau_overlap, optimal_shift_and_se,
                         sign_products, transformed_products, variance_se)
from .seeding import mix_seed
from .simulation import (CltSummary, SimulationConfig, SimulationRecord,
                         clt_replication, records_to_csv, run_grid)

__version__ = "0.1.0"

__all__ = [
    "AttainerToken", "CapabilityError", "CltSummary", "ConcordanceInducing",
    "ConstraintError", "ContractError", "Copula", "DiscreteSymmetricSpec",
    "EstimationResult", "FrechetWeights", "MixtureMoments", "ParseError",
    "Preference", "RankvarError", "ShuffleSpec", "SimulationConfig",
    "SimulationRecord", "SupportKind", "VarianceEnvelope", "beta_clayton",
    "beta_closed_form", "bvn_cdf", "clayton", "clt_replication", "combine",
    "comonotone", "confidence_interval", "counter_monotone",
    "envelope_frechet", "estimate_kappa", "estimate_optimal_shift",
    "estimate_tau", "estimate_tau_overlap", "frechet", "gaussian",
    "independence", "kappa_discrete", "kappa_frechet", "make_builtin",
    "make_discrete", "make_mixture_point_uniform", "mix_seed",
    "optimal_shift_analytic", "optimal_shift_and_se",
    "optimal_shifted_sigma2", "parse_copula", "parse_distribution", "prefer",
    "records_to_csv", "run_grid", "sample_csv", "shifted", "shuffle_of_m",
    "sigma2_beta",
    "sigma2_closed_form", "sigma2_discrete", "sigma2_frechet",
    "sigma2_from_covariances", "sigma2_nvm", "sigma2_nvm_from_var_x2",
    "sigma2_tau_analytic", "sign_products", "squared_copula", "student_t",
    "tau_closed_form", "tau_frechet", "transformed_products", "variance_se",
]
